#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sph/pipeline.hpp"

namespace {

struct Options {
  std::string input;
  std::string example;
  std::string stages;
  std::string out;
  double tol = 1e-8;
  int degree_cap = 4;
  std::uint64_t seed = 12345;
};

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--input", opt.input, "JSON input file with a custom space");
  cmd->add_option("--example", opt.example, "built-in example name");
  cmd->add_option("--stages", opt.stages, "comma-separated stage list");
  cmd->add_option("--out", opt.out, "output directory for reports");
  cmd->add_option("--tol", opt.tol, "numerical tolerance");
  cmd->add_option("--degree-cap", opt.degree_cap, "algebra degree cap");
  cmd->add_option("--seed", opt.seed, "sampling seed");
}

std::vector<std::string> split_stages(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int run(const Options& opt, const std::vector<std::string>& stages,
        bool print_json) {
  sph::PipelineOptions popt;
  popt.tol = opt.tol;
  popt.degree_cap = opt.degree_cap;
  popt.seed = opt.seed;
  popt.out_dir = opt.out;

  std::vector<std::string> targets;
  bool use_input = false;
  if (!opt.input.empty()) {
    use_input = true;
  } else if (!opt.example.empty()) {
    targets.push_back(opt.example);
  } else {
    targets = sph::example_names();
  }

  bool all_pass = true;
  auto handle = [&](const sph::RunReport& rep, const std::string& label) {
    if (print_json) std::cout << rep.json << "\n";
    for (const auto& f : rep.failures)
      std::cerr << "FAIL " << label << ": " << f << "\n";
    std::cout << (rep.all_pass ? "PASS " : "FAIL ") << label << "\n";
    all_pass = all_pass && rep.all_pass;
  };

  try {
    if (use_input) {
      std::ifstream in(opt.input);
      if (!in) {
        std::cerr << "cannot open " << opt.input << "\n";
        return 2;
      }
      std::stringstream buf;
      buf << in.rdbuf();
      handle(sph::run_input(buf.str(), stages, popt), opt.input);
    } else {
      for (const auto& name : targets)
        handle(sph::run_example(name, stages, popt), name);
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Structure theory and constant-term analysis of homogeneous spaces"};
  app.require_subcommand(1);
  Options opt;

  CLI::App* analyze = app.add_subcommand("analyze", "exact structure stage");
  CLI::App* degenerate =
      app.add_subcommand("degenerate", "boundary degenerations");
  CLI::App* fan = app.add_subcommand("fan", "toric fan certification");
  CLI::App* cterm = app.add_subcommand("cterm", "numerical constant term");
  CLI::App* verify = app.add_subcommand("verify", "all stages, all checks");
  CLI::App* report =
      app.add_subcommand("report", "run selected stages, emit reports");
  for (CLI::App* c : {analyze, degenerate, fan, cterm, verify, report})
    add_common(c, opt);

  CLI11_PARSE(app, argc, argv);

  if (analyze->parsed()) return run(opt, {"analyze"}, false);
  if (degenerate->parsed()) return run(opt, {"degenerate"}, false);
  if (fan->parsed()) return run(opt, {"fan"}, false);
  if (cterm->parsed()) return run(opt, {"cterm"}, false);
  if (verify->parsed()) return run(opt, {"verify"}, false);
  std::vector<std::string> stages =
      opt.stages.empty() ? std::vector<std::string>{"verify"}
                         : split_stages(opt.stages);
  return run(opt, stages, true);
}
