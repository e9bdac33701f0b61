#include "emprobe/experiment.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

void set_threads(int threads)
{
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

int env_threads()
{
    const char* v = std::getenv("EMPROBE_THREADS");
    if (!v || !*v) return 0;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1) {
        std::cerr << "warning: ignoring EMPROBE_THREADS=" << v << "\n";
        return 0;
    }
    return static_cast<int>(n);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Numerical lab for inverse source problems of the time-dependent Maxwell equations"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string record_path;
    int threads = 0;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (defaults to the config's output)");
        sub->add_option("--threads", threads, "worker threads (overrides EMPROBE_THREADS)")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "noise seed (overrides the config's seed)");
    };
    CLI::App* forward = app.add_subcommand("forward", "synthesize boundary records");
    CLI::App* reconstruct = app.add_subcommand("reconstruct", "probe a record and reconstruct the source");
    CLI::App* sweep = app.add_subcommand("sweep", "(b, eps) stability sweep");
    CLI::App* lemma = app.add_subcommand("lemma-check", "low-pass energy bound and continuation checks");
    for (CLI::App* sub : {forward, reconstruct, sweep, lemma}) add_common(sub);
    reconstruct->add_option("--record", record_path, "record or family directory (defaults to <out>/record)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        set_threads(threads > 0 ? threads : env_threads());
        emprobe::RunConfig config = emprobe::load_config(config_path);
        for (CLI::App* sub : {forward, reconstruct, sweep, lemma})
            if (sub->parsed() && sub->count("--seed")) config.seed = seed;
        const std::filesystem::path out = out_dir.empty() ? std::filesystem::path(config.output) : std::filesystem::path(out_dir);

        if (forward->parsed()) {
            const auto s = emprobe::cmd_forward(config, out);
            int failed = 0;
            for (std::size_t i = 0; i < s.huygens.size(); ++i) {
                const double rel = s.huygens[i].relative();
                std::cout << "record " << i << ": epsilon " << s.epsilon[i] << ", Huygens residual " << rel << "\n";
                if (rel > config.tolerances.huygens) ++failed;
            }
            std::cout << "wrote " << s.record_path.string() << "\n";
            if (failed) {
                std::cerr << "error: Huygens residual above " << config.tolerances.huygens << "\n";
                return 3;
            }
        } else if (reconstruct->parsed()) {
            std::filesystem::path rec = record_path;
            if (rec.empty()) rec = out / (config.problem == emprobe::ProblemKind::IP2 ? "family" : "record");
            const auto s = emprobe::cmd_reconstruct(config, rec, out);
            for (std::size_t i = 0; i < s.reports.size(); ++i)
                std::cout << "b " << s.reports[i].b << ": error " << s.reports[i].reconstruction_error << " (relative "
                          << s.relative_errors[i] << ")\n";
        } else if (sweep->parsed()) {
            const auto s = emprobe::cmd_sweep(config, out);
            std::cout << "fitted C " << s.fit.C_all << " (halves " << s.fit.C_first << ", " << s.fit.C_second
                      << "), stable " << (s.fit.stable ? "yes" : "no") << "\n";
        } else if (lemma->parsed()) {
            const auto s = emprobe::cmd_lemma_check(config, out);
            std::cout << "low-pass bound: " << s.lemma31_samples - s.lemma31_failures << "/" << s.lemma31_samples
                      << " samples pass\n";
            std::cout << "continuation check: " << (s.lemma32.report.holds ? "holds" : "violated") << " ("
                      << s.lemma32.report.violations << " violations)\n";
        }
        return 0;
    } catch (const emprobe::IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 4;
    } catch (const emprobe::AccuracyError& e) {
        std::cerr << "accuracy error: " << e.what() << "\n";
        return 3;
    } catch (const emprobe::BandwidthViolation& e) {
        std::cerr << "bandwidth violation: " << e.what() << "\n";
        return 3;
    } catch (const emprobe::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const emprobe::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
}
