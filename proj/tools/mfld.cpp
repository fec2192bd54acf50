#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>

#include "mfld/errors.hpp"
#include "mfld/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvariant = 1;
constexpr int kExitConfig = 2;

void print_record(const mfld::ExperimentRecord& rec, const std::string& out_dir) {
  std::cout << rec.subcommand << ": ok, " << rec.outputs.size() << " file(s) in " << out_dir
            << "\n";
  for (const auto& [key, value] : rec.diagnostics)
    std::cout << "  " << key << " = " << value << "\n";
}

int dispatch(const std::string& name, const std::string& config_path,
             const std::string& output_override) {
  mfld::ExperimentConfig c = mfld::load_config(config_path);
  if (!output_override.empty()) c.output_directory = output_override;
  mfld::ExperimentRecord rec;
  if (name == "hartree-run") rec = mfld::run_hartree(c);
  else if (name == "fluctuation-run") rec = mfld::run_fluctuation(c);
  else if (name == "oracle-run") rec = mfld::run_oracle(c);
  else rec = mfld::run_compare(c);
  print_record(rec, c.output_directory);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hartree / Bogoliubov large-deviation toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_override;
  std::uint64_t seed = 12345;
  bool inject_k2 = false;

  const char* run_names[] = {"hartree-run", "fluctuation-run", "oracle-run", "compare"};
  const char* run_help[] = {
      "integrate the Hartree equation and export the trajectory",
      "solve the backward fluctuation equation along the Hartree flow",
      "exact finite-N sweep: laws, LMGF and tails of the centered observable",
      "oracle vs Bogoliubov prediction: LMGF, rate, Chebyshev and CLT tables"};
  for (int i = 0; i < 4; ++i) {
    CLI::App* sub = app.add_subcommand(run_names[i], run_help[i]);
    sub->add_option("config", config_path, "experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--output", output_override, "override [output] directory");
  }
  CLI::App* selftest =
      app.add_subcommand("self-test", "reduced-size invariant battery, no files written");
  selftest->add_option("--seed", seed, "RNG seed for the randomized checks");
  selftest->add_flag("--inject-k2-defect", inject_k2,
                     "corrupt one K2 entry to exercise the failure path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (selftest->parsed()) {
      mfld::SelfTestResult res = mfld::self_test(seed, inject_k2);
      for (const auto& ck : res.checks)
        std::cout << (ck.passed ? "[ ok ] " : "[FAIL] ") << ck.name << ": " << ck.detail
                  << "\n";
      std::cout << res.checks.size() << " checks, " << res.failures() << " failure(s), "
                << res.elapsed_seconds << " s\n";
      return res.passed() ? kExitOk : kExitInvariant;
    }
    for (const auto* name : run_names)
      if (app.get_subcommand(name)->parsed()) return dispatch(name, config_path, output_override);
    std::cerr << "no subcommand\n";
    return kExitConfig;
  } catch (const mfld::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const mfld::parameter_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const mfld::basis_size_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "invariant failure: " << e.what() << "\n";
    return kExitInvariant;
  }
}
