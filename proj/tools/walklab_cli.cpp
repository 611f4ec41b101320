// Command line front end. Each subcommand loads JSON configs, runs one
// experiment, prints a console summary, and writes the report artifact in the
// requested format. Exit codes: 0 success, 2 budget exceeded, 3 bad
// configuration or usage, 4 acceptance suite failure, 1 anything else.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "walklab/suite.hpp"

namespace {

using namespace walklab;

struct CliState {
  std::string group_path;
  std::string measure_path;
  std::string subgroup_path;
  std::string out;
  std::string format = "json";
  bool quick = false;
  RunOptions opt;
};

std::string default_out_dir() {
  const char* env = std::getenv("WALKLAB_OUT");
  return (env && *env) ? env : ".";
}

std::string artifact_path(const CliState& cli, const std::string& id) {
  if (!cli.out.empty()) return cli.out;
  const std::string ext = cli.format == "svg" ? "svg" : cli.format;
  return default_out_dir() + "/" + id + "." + ext;
}

std::string render_artifact(const ExperimentReport& rep, const std::string& format) {
  if (format == "csv") return report_to_csv(rep);
  if (format == "svg") return render_plot(rep, rep.plot);
  return report_to_json(rep, false).dump(2) + "\n";
}

void print_summary(const ExperimentReport& rep, const std::string& path) {
  std::cout << "report: " << rep.id << "\n";
  for (const auto& [k, v] : rep.summary.items()) std::cout << "  " << k << " = " << v.dump() << "\n";
  for (const auto& [k, v] : rep.verdicts.items()) std::cout << "  " << k << ": " << v.dump() << "\n";
  for (const ReportTable& t : rep.tables)
    std::cout << "  table " << t.name << ": " << t.rows.size() << " rows\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", rep.wall_time_s);
  std::cout << "wrote " << path << " (" << buf << " s)\n";
}

void emit(const ExperimentReport& rep, const CliState& cli) {
  const std::string path = artifact_path(cli, rep.id);
  write_text_file(path, render_artifact(rep, cli.format));
  print_summary(rep, path);
}

void add_io_flags(CLI::App* sub, CliState& cli) {
  sub->add_option("--out", cli.out, "artifact path (default $WALKLAB_OUT/<id>.<format>)");
  sub->add_option("--format", cli.format, "artifact format")
      ->check(CLI::IsMember({"csv", "json", "svg"}));
}

void add_budget_flags(CLI::App* sub, CliState& cli, bool with_mc) {
  sub->add_option("--cap", cli.opt.cap, "support size budget");
  sub->add_option("--nmax", cli.opt.nmax, "table depth");
  if (with_mc) {
    sub->add_option("--horizon", cli.opt.horizon, "walk length");
    sub->add_option("--replicas", cli.opt.replicas, "independent walks");
    sub->add_option("--seed", cli.opt.seed, "random seed");
  }
}

int dispatch(const std::string& name, const CliState& cli) {
  if (name == "suite") {
    const SuiteResult suite = run_suite(cli.quick, &std::cout);
    emit(suite_report(suite, cli.quick), cli);
    return suite.pass ? 0 : 4;
  }

  const Group g = group_from_file(cli.group_path);
  if (name == "growth") {
    emit(run_growth(g, cli.opt), cli);
  } else if (name == "enumerate") {
    emit(run_enumerate(g, cli.opt), cli);
  } else if (name == "walk") {
    emit(run_walk(measure_from_file(g, cli.measure_path, cli.opt.cap), cli.opt), cli);
  } else if (name == "entropy") {
    emit(run_entropy(measure_from_file(g, cli.measure_path, cli.opt.cap), cli.opt), cli);
  } else if (name == "ratio") {
    emit(run_ratio(measure_from_file(g, cli.measure_path, cli.opt.cap), cli.opt), cli);
  } else if (name == "census") {
    emit(run_census(g, load_json_file(cli.subgroup_path), cli.opt), cli);
  } else if (name == "degenerate") {
    emit(run_degenerate(g, load_json_file(cli.measure_path), cli.opt), cli);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random walks on finitely generated groups"};
  app.require_subcommand(1);
  CliState cli;

  CLI::App* growth = app.add_subcommand("growth", "growth series and exponential rate");
  growth->add_option("--group", cli.group_path, "group config")->required();
  add_budget_flags(growth, cli, false);
  add_io_flags(growth, cli);

  CLI::App* enumerate = app.add_subcommand("enumerate", "series coefficients against enumeration");
  enumerate->add_option("--group", cli.group_path, "group config")->required();
  add_budget_flags(enumerate, cli, false);
  add_io_flags(enumerate, cli);

  for (const std::string name : {"walk", "entropy", "ratio"}) {
    CLI::App* sub = app.add_subcommand(
        name, name == "walk"      ? "sampled drift"
              : name == "entropy" ? "entropy table from convolutions"
                                  : "entropy to drift-times-growth comparison");
    sub->add_option("--group", cli.group_path, "group config")->required();
    sub->add_option("--measure", cli.measure_path, "measure config")->required();
    add_budget_flags(sub, cli, true);
    add_io_flags(sub, cli);
  }

  CLI::App* census = app.add_subcommand("census", "coset automaton or slice census");
  census->add_option("--group", cli.group_path, "group config")->required();
  census->add_option("--subgroup", cli.subgroup_path, "subgroup or semigroup config")->required();
  add_budget_flags(census, cli, false);
  add_io_flags(census, cli);

  CLI::App* degenerate = app.add_subcommand("degenerate", "ratio scan along a measure family");
  degenerate->add_option("--group", cli.group_path, "group config")->required();
  degenerate->add_option("--measure", cli.measure_path, "family config with eps grid")->required();
  add_budget_flags(degenerate, cli, true);
  add_io_flags(degenerate, cli);

  CLI::App* suite = app.add_subcommand("suite", "run the acceptance battery");
  suite->add_flag("--quick", cli.quick, "smaller sampling budgets, same tolerances");
  add_io_flags(suite, cli);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    return dispatch(app.get_subcommands().front()->get_name(), cli);
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
