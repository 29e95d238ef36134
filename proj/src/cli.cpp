#include "acecost/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <sstream>

#include "acecost/adder_oracle.hpp"
#include "acecost/analyzer.hpp"
#include "acecost/model_zoo.hpp"
#include "acecost/quant_sim.hpp"
#include "acecost/report_io.hpp"

namespace acecost::cli {

namespace {

// Failure carrying the exit code it should map to.
struct Failure {
  int code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kInputError, path + ": cannot open file"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Parses and validates; all problems here are input errors.
Graph load_graph(const std::string& path) {
  const auto text = read_file(path);
  Graph g;
  try {
    g = parse_graph(text);
  } catch (const ParseError& e) {
    throw Failure{kInputError, path + ": parse error: " + e.what()};
  } catch (const NodeError& e) {
    throw Failure{kInputError, path + ": node '" + e.node_id() + "': " + e.what()};
  }
  const auto diags = validate(g);
  if (!diags.empty()) {
    std::string msg = path + ": " + std::to_string(diags.size()) + " validation error(s)";
    for (const auto& d : diags)
      msg += "\n  [" + d.rule + "] " + (d.node_id.empty() ? "<graph>" : d.node_id) + ": " + d.message;
    throw Failure{kInputError, msg};
  }
  return g;
}

template <typename F>
auto guarded_analysis(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const Failure&) {
    throw;
  } catch (const NodeError& e) {
    throw Failure{kAnalysisError, path + ": analysis error at '" + e.node_id() + "': " + e.what()};
  } catch (const Error& e) {
    throw Failure{kAnalysisError, path + ": analysis error: " + e.what()};
  }
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw Failure{kInputError, out_path + ": cannot write file"};
  f << text;
}

void stamp(std::ostream& err, const std::string& what) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  err << "# acecost " << what << " report_version=" << kReportVersion << " ir_version=" << kIrVersion
      << " generated=" << buf << '\n';
}

std::string render(const CostReport& r, const std::string& format) {
  if (format == "json") return report_to_json(r);
  if (format == "csv") return report_to_csv(r);
  if (format == "markdown") return report_to_markdown(r);
  return report_to_table(r);
}

std::string render(const std::vector<ComparisonRow>& rows, const std::string& format) {
  if (format == "json") return comparison_to_json(rows);
  if (format == "csv") return comparison_to_csv(rows);
  if (format == "markdown") return comparison_to_markdown(rows);
  return comparison_to_table(rows);
}

int cmd_oracle(int max_bits, const std::vector<int>& fp, const std::vector<int>& shifter,
               std::ostream& out) {
  bool mismatch = false;
  if (max_bits > 0) {
    const auto bad = verify_multiply_formula(max_bits);
    out << bad.size() << " mismatches / " << max_bits * max_bits << " pairs\n";
    for (const auto& m : bad) {
      out << "  " << m.i << "x" << m.j << ": constructed " << m.constructed << ", formula "
          << m.predicted << '\n';
    }
    mismatch = mismatch || !bad.empty();
  }
  if (fp.size() == 2) {
    const auto b = fp_adder_breakdown(fp[0], fp[1]);
    const int bits = fp[0] + fp[1] + 1;
    const double bound = kFloatAddFactor * bits;
    std::vector<std::pair<std::string, double>> rows = {
        {"exponent_subtraction", b.exponent_subtraction},
        {"operand_swapping", b.operand_swapping},
        {"alignment_limit", b.alignment_limit},
        {"alignment_shift", b.alignment_shift},
        {"significand_negation", b.significand_negation},
        {"significand_addition", b.significand_addition},
        {"significand_conversion", b.significand_conversion},
        {"normalization", b.normalization},
        {"rounding_postnorm", b.rounding_postnorm},
        {"total", b.total},
        {"bound_6x_fixed_add", bound},
    };
    for (const auto& [k, v] : rows) out << k << ',' << format_fixed(v, 4) << '\n';
    out << "fp adder (e=" << fp[0] << ", m=" << fp[1] << "): total " << format_fixed(b.total, 4)
        << (b.total <= bound ? " <= " : " > ") << bound << '\n';
    mismatch = mismatch || b.total > bound;
  }
  if (shifter.size() == 2) {
    const auto t = barrel_mux_count(shifter[0], shifter[1]);
    const auto closed = ace_shift(NumericFormat::fixed(shifter[0]), shifter[1]);
    const bool same = t.bitadder_equivalent() == closed;
    out << "barrel shifter i=" << shifter[0] << " j=" << shifter[1] << ": " << t.mux21
        << " muxes = " << t.bitadder_equivalent().to_decimal() << " bit-adders, closed form "
        << closed.to_decimal() << (same ? " (match)" : " (MISMATCH)") << '\n';
    mismatch = mismatch || !same;
  }
  return mismatch ? kOracleMismatch : kOk;
}

Graph zoo_model(const std::string& model, const std::string& scale, const std::vector<int>& bits,
                int branches, const std::string& activation, const std::string& granularity) {
  auto fmt = [&](std::size_t k, int fallback) {
    return NumericFormat::fixed(bits.size() == 2 ? bits[k] : fallback);
  };
  if (model == "pikelpn") return zoo::build_pikelpn(zoo::parse_pike_scale(scale.empty() ? "1x" : scale));
  if (model == "mobilenet_v1") {
    const auto w = fmt(0, 8), a = fmt(1, 8);
    return zoo::build_mobilenet_v1(1.0, w, a, NumericFormat::fixed(8));
  }
  if (model == "mobilenet_v2") {
    ActivationKind act = ActivationKind::ReLU;
    if (activation == "prelu") act = ActivationKind::PReLU;
    else if (activation == "dprelu") act = ActivationKind::DPReLU;
    Granularity g = Granularity::Channelwise;
    if (granularity == "layerwise") g = Granularity::Layerwise;
    else if (granularity == "subchannelwise") g = Granularity::SubChannelwise;
    return zoo::build_mobilenet_v2(fmt(0, 4).total_bits, fmt(1, 4).total_bits, act, g);
  }
  if (model == "resnet50") {
    const auto w = fmt(0, 8), a = fmt(1, 8);
    return zoo::build_resnet50_branches(branches, w, a, w, w);
  }
  return zoo::build_named(model);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Arithmetic-effort, energy and intensity analysis for quantized network graphs",
               "acecost"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::string model_path, format = "table", out_path;
  bool with_stamp = false;

  auto* analyze = app.add_subcommand("analyze", "Cost report for one IR file");
  analyze->add_option("model", model_path, "IR JSON file")->required();
  analyze->add_option("--format", format, "json, csv, table or markdown")
      ->check(CLI::IsMember({"json", "csv", "table", "markdown"}));
  analyze->add_option("-o,--out", out_path, "Write to a file instead of stdout");
  analyze->add_flag("--stamp", with_stamp, "Print run metadata to stderr");

  auto* census = app.add_subcommand("census", "Per-layer operation counts as CSV");
  census->add_option("model", model_path, "IR JSON file")->required();
  census->add_option("-o,--out", out_path, "Write to a file instead of stdout");
  census->add_flag("--stamp", with_stamp, "Print run metadata to stderr");

  int max_bits = 0;
  std::vector<int> fp_adder, shifter;
  auto* oracle = app.add_subcommand("oracle", "Check closed forms against gate-level constructions");
  oracle->add_option("--max-bits", max_bits, "Check every multiplier up to N x N bits")
      ->check(CLI::Range(1, 64));
  oracle->add_option("--fp-adder", fp_adder, "Exponent and mantissa bits")
      ->expected(2)
      ->check(CLI::Range(2, 64));
  oracle->add_option("--shifter", shifter, "Value bits and shift range")->expected(2);

  std::string zoo_name, scale, activation = "relu", granularity = "channelwise";
  std::vector<int> bits;
  int branches = 2;
  bool list_models = false;
  auto* zoo_cmd = app.add_subcommand("zoo", "Reference model graphs");
  zoo_cmd->require_subcommand(1, 1);
  auto* emit_cmd = zoo_cmd->add_subcommand("emit", "Write a model graph as IR JSON");
  emit_cmd->add_option("model", zoo_name,
                       "pikelpn, mobilenet_v1, mobilenet_v2, resnet50 or a named configuration")
      ->required();
  emit_cmd->add_option("--scale", scale, "PikeLPN scale")
      ->check(CLI::IsMember({"1x", "2x", "3x", "6x"}));
  emit_cmd->add_option("--bits", bits, "Weight and activation bits")->expected(2)->check(CLI::Range(1, 32));
  emit_cmd->add_option("--branches", branches, "ResNet-50 branch count")->check(CLI::Range(2, 4));
  emit_cmd->add_option("--activation", activation, "MobileNetV2 activation")
      ->check(CLI::IsMember({"relu", "prelu", "dprelu"}));
  emit_cmd->add_option("--granularity", granularity, "MobileNetV2 scale granularity")
      ->check(CLI::IsMember({"layerwise", "channelwise", "subchannelwise"}));
  emit_cmd->add_option("-o,--out", out_path, "Write to a file instead of stdout");
  auto* list_cmd = zoo_cmd->add_subcommand("list", "List named configurations");
  list_cmd->callback([&] { list_models = true; });

  std::vector<std::string> compare_paths;
  std::vector<std::string> accuracy_args;
  bool compare_csv = false;
  auto* compare_cmd = app.add_subcommand("compare", "Side-by-side costs of several IR files");
  compare_cmd->add_option("models", compare_paths, "IR JSON files")->required();
  compare_cmd->add_option("--format", format, "json, csv, table or markdown")
      ->check(CLI::IsMember({"json", "csv", "table", "markdown"}));
  compare_cmd->add_flag("--csv", compare_csv, "Shorthand for --format csv");
  compare_cmd->add_option("--accuracy", accuracy_args, "name=value pairs used for Pareto flags");
  compare_cmd->add_option("-o,--out", out_path, "Write to a file instead of stdout");
  compare_cmd->add_flag("--stamp", with_stamp, "Print run metadata to stderr");

  quant::NormSuiteConfig suite;
  auto* qsim = app.add_subcommand("quantsim", "QuantNorm vs per-parameter BN quantization MSE as CSV");
  qsim->add_option("--trials", suite.trials, "Number of random parameter sets")->check(CLI::Range(1, 1000000));
  qsim->add_option("--channels", suite.channels, "Channels per trial")->check(CLI::Range(1, 100000));
  qsim->add_option("--seed", suite.seed, "Root seed");
  qsim->add_option("-o,--out", out_path, "Write to a file instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*analyze) {
      const auto g = load_graph(model_path);
      const auto report = guarded_analysis(model_path, [&] { return acecost::analyze(g); });
      if (with_stamp) stamp(err, "analyze");
      emit(render(report, format), out_path, out);
      return kOk;
    }
    if (*census) {
      const auto g = load_graph(model_path);
      const auto tally = guarded_analysis(model_path, [&] { return census_graph(g); });
      if (with_stamp) stamp(err, "census");
      emit(census_to_csv(tally), out_path, out);
      return kOk;
    }
    if (*oracle) {
      if (max_bits == 0 && fp_adder.empty() && shifter.empty()) {
        err << "oracle: give --max-bits, --fp-adder or --shifter\n";
        return kUsage;
      }
      if (shifter.size() == 2 && (shifter[0] < 1 || shifter[1] < 2)) {
        err << "oracle: --shifter needs value bits >= 1 and range >= 2\n";
        return kUsage;
      }
      return cmd_oracle(max_bits, fp_adder, shifter, out);
    }
    if (*zoo_cmd) {
      if (list_models) {
        for (const auto& n : zoo::model_names()) out << n << '\n';
        return kOk;
      }
      Graph g;
      try {
        g = zoo_model(zoo_name, scale, bits, branches, activation, granularity);
      } catch (const Error& e) {
        err << "zoo: " << e.what() << '\n';
        return kUsage;
      }
      emit(serialize_graph(g), out_path, out);
      return kOk;
    }
    if (*compare_cmd) {
      if (compare_csv) format = "csv";
      std::map<std::string, double> accuracy;
      for (const auto& a : accuracy_args) {
        const auto eq = a.find('=');
        if (eq == std::string::npos) {
          err << "compare: --accuracy expects name=value, got '" << a << "'\n";
          return kUsage;
        }
        try {
          accuracy[a.substr(0, eq)] = std::stod(a.substr(eq + 1));
        } catch (const std::exception&) {
          err << "compare: bad accuracy value in '" << a << "'\n";
          return kUsage;
        }
      }

      struct Outcome {
        std::string path;
        std::optional<std::pair<std::string, CostReport>> report;
        std::optional<Failure> failure;
      };
      std::vector<std::future<Outcome>> jobs;
      for (const auto& path : compare_paths) {
        jobs.push_back(std::async(std::launch::async, [path] {
          Outcome o{path, std::nullopt, std::nullopt};
          try {
            const auto g = load_graph(path);
            auto r = guarded_analysis(path, [&] { return acecost::analyze(g); });
            const std::string name = g.name.empty() ? path : g.name;
            o.report = std::make_pair(name, std::move(r));
          } catch (const Failure& f) {
            o.failure = f;
          }
          return o;
        }));
      }
      std::vector<std::pair<std::string, CostReport>> reports;
      int code = kOk;
      for (auto& j : jobs) {
        auto o = j.get();
        if (o.failure) {
          err << o.failure->message << '\n';
          code = std::max(code, o.failure->code);
        } else {
          reports.push_back(std::move(*o.report));
        }
      }
      if (with_stamp) stamp(err, "compare");
      emit(render(compare(std::move(reports), accuracy), format), out_path, out);
      return code == kOk ? kOk : kInputError;
    }
    if (*qsim) {
      const auto trials = quant::run_norm_suite(suite);
      std::ostringstream csv;
      csv << "trial,vanilla_mse,quantnorm_mse,quantnorm_better\n";
      std::size_t wins = 0;
      double sv = 0, sq = 0;
      for (std::size_t t = 0; t < trials.size(); ++t) {
        const bool win = trials[t].quantnorm_mse <= trials[t].vanilla_mse;
        wins += win;
        sv += trials[t].vanilla_mse;
        sq += trials[t].quantnorm_mse;
        csv << t << ',' << format_significant(trials[t].vanilla_mse, 6) << ','
            << format_significant(trials[t].quantnorm_mse, 6) << ',' << (win ? 1 : 0) << '\n';
      }
      emit(csv.str(), out_path, out);
      const double n = static_cast<double>(trials.size());
      err << "quantnorm <= vanilla in " << wins << " / " << trials.size()
          << " trials; mean mse vanilla " << format_significant(sv / n, 4) << ", quantnorm "
          << format_significant(sq / n, 4) << '\n';
      return kOk;
    }
  } catch (const Failure& f) {
    err << f.message << '\n';
    return f.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kAnalysisError;
  }
  return kUsage;
}

}  // namespace acecost::cli
