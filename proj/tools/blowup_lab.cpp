// blowup-lab: run one JSON problem spec and write its artifacts.
#include <CLI11.hpp>

#include <iostream>

#include "blowup/errors.hpp"
#include "blowup/problem_spec.hpp"
#include "blowup/run.hpp"

namespace {

enum Exit { kOk = 0, kIo = 1, kSpec = 2, kNumerical = 3, kVerification = 4 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Green's-function and multibubble blow-up toolkit"};
  app.require_subcommand(1);

  std::string spec_path, out_dir;
  int threads = 1, verbosity = 1;
  CLI::App* run = app.add_subcommand("run", "run a problem spec");
  run->add_option("--spec", spec_path, "JSON problem spec")->required()->check(CLI::ExistingFile);
  run->add_option("--out-dir", out_dir, "output directory")->required();
  run->add_option("--threads", threads, "worker threads for independent solves")
      ->check(CLI::Range(1, 256));
  run->add_option("--verbosity", verbosity, "0 quiet, 1 progress, 2 detail")->check(CLI::IsMember({0, 1, 2}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kSpec;
  }

  try {
    const blowup::ProblemSpec spec = blowup::load_problem_spec(spec_path);
    blowup::RunOptions opt;
    opt.out_dir = out_dir;
    opt.threads = threads;
    opt.verbosity = verbosity;
    opt.log = &std::cerr;
    const blowup::RunReport report = blowup::run(spec, opt);
    if (spec.task == blowup::Task::Verify && !report.all_checks_passed()) {
      std::cerr << "verification failed\n";
      return kVerification;
    }
    if (verbosity > 0) std::cerr << "done: " << report.manifest.size() << " files in " << out_dir << "\n";
    return kOk;
  } catch (const blowup::SpecError& e) {
    std::cerr << "spec error at " << e.what() << "\n";
    return kSpec;
  } catch (const blowup::CertificationError& e) {
    std::cerr << "not certified: " << e.what() << "\n";
    return kNumerical;
  } catch (const blowup::InputError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kSpec;
  } catch (const blowup::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const blowup::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
}
