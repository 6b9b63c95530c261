#pragma once

// Waveform-level two-phase AF chain and the distortion-aware MRC receiver.

#include <span>
#include <string>
#include <vector>

#include "afrelay/allocator.hpp"
#include "afrelay/link_model.hpp"
#include "afrelay/pa_model.hpp"

namespace afrelay {

/// All signals of one relay slot.
struct SlotSignal {
    complex source_symbol;
    complex relay_rx;
    complex relay_tx;
    complex dest_rx;
    complex fade_sr;
    complex fade_rd;
};

struct EquivalentLink {
    complex h;     // alpha f g
    double var_h;  // |alpha|^2 var_sr var_rd
    double var_w;  // equivalent noise variance at the destination
};

class Constellation {
public:
    Constellation(std::string name, std::vector<complex> points, int label_bits);

    /// Gray-labelled QPSK, point k carries label k.
    static Constellation qpsk();
    /// Gray-labelled square 16-QAM.
    static Constellation qam16();

    const std::string& name() const { return name_; }
    std::span<const complex> points() const { return points_; }
    int label_bits() const { return label_bits_; }
    /// Index of the nearest point; ties go to the lowest index.
    std::size_t nearest(complex z) const;

private:
    std::string name_;
    std::vector<complex> points_;
    int label_bits_;
};

/// Thrown when every channel estimate passed to the combiner is zero.
class detection_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Relay scaling factor sqrt(P / (P_s var_sr + N0)); E{|x|^2} = P.
double relay_scale(const LinkStats& link, double power);

/// Deterministic amplitude sqrt(P_s P / (P_s var_sr + N0)) multiplying h in
/// the equivalent-channel model y = amplitude * h * s + w.
double equivalent_amplitude(const LinkStats& link, double power);

/// Draws the slot's noises for given fades: r = sqrt(P_s) f s + n,
/// x = relay_scale * r, y = g F_A(x) + v.  gamma = 0 means a silent relay
/// (y = v).  Noise is drawn in the order n, v.
SlotSignal transmit_slot(const LinkStats& link, double gamma, const PaParams& pa,
                         complex symbol, complex fade_sr, complex fade_rd, RngStream& rng);

/// Draws f, g and then the slot noises.
SlotSignal simulate_slot(const LinkStats& link, double gamma, const PaParams& pa,
                         complex symbol, RngStream& rng);

/// Equivalent link for one relay at drive power gamma, using the closed-form
/// Bussgang parameters (a naive model substitutes alpha = 1, sigma_d^2 = 0).
EquivalentLink equivalent_link(const LinkStats& link, double gamma, const PaParams& pa,
                               complex fade_sr, complex fade_rd, bool distortion_aware = true);

/// Linear-MMSE estimate of h from one pilot observation y = s_p h + w:
///   h_hat = (|s_p|^2 / var_w + 1 / var_h)^-1 s_p^* y / var_w.
complex estimate_channel(complex pilot, complex y_pilot, const EquivalentLink& eq);

/// Combined statistic z = sum y_i h_i^* / sum |h_i|^2.
complex mrc_combine(std::span<const complex> y, std::span<const complex> h_hat);

/// Nearest constellation point to mrc_combine(y, h_hat).
complex mrc_detect(std::span<const complex> y, std::span<const complex> h_hat,
                   const Constellation& constellation);

enum class Estimation { pilot, ideal };

struct ReceiverOptions {
    Estimation estimation = Estimation::pilot;
    bool distortion_aware = true;
    int block_length = 100;  // data symbols per fading block
    Constellation constellation = Constellation::qpsk();
    complex pilot = {1.0, 0.0};
};

struct ReceiverStats {
    long long symbols = 0;
    long long errors = 0;
    double ser() const { return symbols == 0 ? 0.0 : static_cast<double>(errors) / symbols; }
};

/// Runs the full chain for n_symbols data symbols: per block, draw fades,
/// send the pilot through every active relay, estimate the folded effective
/// channels, then detect each data symbol by MRC.  Relays with gamma = 0
/// never transmit and are left out of the combiner.
///
/// Random draws do not depend on the receiver options, so any two runs from
/// equal RngStreams see the same channels and noise.
ReceiverStats run_receiver(const NetworkStats& net, const Allocation& alloc, const PaParams& pa,
                           long long n_symbols, RngStream& rng,
                           const ReceiverOptions& options = {});

/// Symbol error rate of run_receiver with the given options.
double receiver_pipeline(const NetworkStats& net, const Allocation& alloc, const PaParams& pa,
                         long long n_symbols, RngStream& rng, const ReceiverOptions& options = {});

/// Validation used by the waveform chain, which unlike the statistical
/// model also accepts n0 = 0.
void validate_waveform_link(const LinkStats& link);

}  // namespace afrelay
