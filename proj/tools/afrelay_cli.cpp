#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "afrelay/cli.hpp"

namespace cli = afrelay::cli;

namespace {

struct CommonFlags {
    std::string config;
    std::string out;
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    int jobs = 1;
};

void add_common(CLI::App* sub, CommonFlags& flags) {
    sub->add_option("--config", flags.config, "key=value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "output file (default: stdout)");
    sub->add_option("--format", flags.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", flags.seed, "override master_seed");
    sub->add_option("--jobs", flags.jobs, "worker threads")->check(CLI::PositiveNumber);
}

cli::RunManifest manifest(cli::Command cmd, const CommonFlags& f) {
    cli::RunManifest m;
    m.command = cmd;
    m.config_path = f.config;
    m.output_path = f.out;
    m.format = f.format == "json" ? cli::Format::json : cli::Format::csv;
    m.seed_override = f.seed;
    m.jobs = f.jobs;
    return m;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Power allocation and capacity study for AF relay networks with soft-limiter amplifiers"};
    app.set_version_flag("--version", cli::kVersion);
    app.require_subcommand(1);

    double mu_db = -15.0;
    auto* gamma_opt = app.add_subcommand("gamma-opt", "SNR-maximizing drive power for a noise level");
    gamma_opt->add_option("--mu-db", mu_db, "normalized noise power N0/A_sat^2 in dB");

    CommonFlags alloc_flags;
    double snr_db = 10.0;
    auto* allocate = app.add_subcommand("allocate", "relay power allocation for one network SNR");
    add_common(allocate, alloc_flags);
    allocate->add_option("--snr-db", snr_db, "relay network SNR P_r/N0 in dB");

    CommonFlags sweep_flags;
    auto* sweep = app.add_subcommand("sweep", "four-scheme capacity sweep");
    add_common(sweep, sweep_flags);

    CommonFlags bussgang_flags;
    std::vector<double> gammas{0.01, 0.1, 1.0, 10.0};
    int samples = 1000000;
    auto* bussgang = app.add_subcommand("bussgang", "empirical vs closed-form linearization");
    add_common(bussgang, bussgang_flags);
    bussgang->add_option("--gammas", gammas, "normalized drive powers")->delimiter(',');
    bussgang->add_option("--samples", samples, "samples per drive power");

    CommonFlags ser_flags;
    long long symbols = 100000;
    std::string estimation = "pilot";
    auto* ser = app.add_subcommand("ser", "SER of distortion-aware vs naive MRC receivers");
    add_common(ser, ser_flags);
    ser->add_option("--symbols", symbols, "data symbols per SNR point");
    ser->add_option("--estimation", estimation, "channel estimation mode")
        ->check(CLI::IsMember({"pilot", "ideal"}));

    CLI11_PARSE(app, argc, argv);

    if (*gamma_opt) return cli::cmd_gamma_opt(mu_db, std::cout, std::cerr);
    if (*allocate) {
        return cli::cmd_allocate(manifest(cli::Command::allocate, alloc_flags), snr_db, std::cerr);
    }
    if (*sweep) return cli::cmd_sweep(manifest(cli::Command::sweep, sweep_flags), std::cerr);
    if (*bussgang) {
        return cli::cmd_bussgang(manifest(cli::Command::bussgang, bussgang_flags), gammas, samples,
                                 std::cerr);
    }
    if (*ser) {
        return cli::cmd_ser(manifest(cli::Command::ser, ser_flags), symbols,
                            estimation == "ideal" ? afrelay::Estimation::ideal
                                                  : afrelay::Estimation::pilot,
                            std::cerr);
    }
    return 1;
}
