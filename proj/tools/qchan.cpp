// Command-line front end: family specs in, JSON/CSV out.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qchan/acceptance.hpp"
#include "qchan/bounds.hpp"
#include "qchan/divergence.hpp"
#include "qchan/fisher.hpp"
#include "qchan/io.hpp"
#include "qchan/metrology.hpp"
#include "qchan/protocol.hpp"
#include "qchan/version.hpp"

namespace {

using namespace qchan;

constexpr int exit_ok = 0;
constexpr int exit_invariant = 2;
constexpr int exit_spec = 3;

struct CommonOpts {
  std::string family_path;
  std::string out_path;
  std::uint64_t seed = default_seed;
  std::string format = "json";
  double alpha = 0.5;
  std::vector<double> n_list;
  int restarts = 64;
  long long trials = 10000;
  double confidence = 0.9;
  double eps = 0.0;
  std::vector<double> t;
  std::vector<double> t2;
  bool sweep = false;
  int points = 50;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool family_required = true) {
  auto* fam = cmd->add_option("--family", o.family_path, "family spec file");
  if (family_required) fam->required();
  cmd->add_option("--out", o.out_path, "output path (default: stdout)");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--format", o.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--alpha", o.alpha, "protocol rate parameter");
  cmd->add_option("--n", o.n_list, "list of channel-use counts")->delimiter(',');
  cmd->add_option("--restarts", o.restarts, "variational restarts");
  cmd->add_option("--trials", o.trials, "Monte-Carlo trials");
  cmd->add_option("--confidence", o.confidence, "confidence level p");
  cmd->add_option("--eps", o.eps, "error threshold for rate statements");
  cmd->add_option("--t", o.t, "parameter point")->delimiter(',');
  cmd->add_option("--t2", o.t2, "second parameter point")->delimiter(',');
}

void emit(const CommonOpts& o, const std::string& text) {
  if (o.out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    std::ofstream out(o.out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + o.out_path);
    out << text;
  }
}

Json config_json(const CommonOpts& o, const std::string& command) {
  Json j;
  j["command"] = command;
  j["family"] = o.family_path;
  j["seed"] = o.seed;
  j["format"] = o.format;
  j["alpha"] = o.alpha;
  j["restarts"] = o.restarts;
  j["trials"] = o.trials;
  j["confidence"] = o.confidence;
  if (!o.n_list.empty()) j["n"] = o.n_list;
  if (!o.t.empty()) j["t"] = o.t;
  if (!o.t2.empty()) j["t2"] = o.t2;
  return j;
}

std::string csv_preamble(const CommonOpts& o, const std::string& command) {
  std::ostringstream s;
  s << "# qchan " << version << " config " << config_json(o, command).dump() << "\n";
  return s.str();
}

RealVec point_or(const ChannelFamily& f, const std::vector<double>& given,
                 double fraction) {
  if (!given.empty()) {
    if (static_cast<int>(given.size()) != f.v)
      throw std::invalid_argument("parameter point has wrong dimension for the family");
    RealVec t(f.v);
    for (int i = 0; i < f.v; ++i) t[i] = given[static_cast<std::size_t>(i)];
    if (!point_in_box(f, t)) throw std::invalid_argument("parameter point lies outside the box");
    return t;
  }
  RealVec t(f.v);
  for (int i = 0; i < f.v; ++i) {
    auto [lo, hi] = f.box[static_cast<std::size_t>(i)];
    t[i] = lo + fraction * (hi - lo);
  }
  return t;
}

std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

int cmd_fisher(const CommonOpts& o) {
  ChannelFamily fam = load_family_spec(o.family_path);
  if (o.sweep) {
    std::ostringstream csv;
    csv << csv_preamble(o, "fisher");
    for (int i = 0; i < fam.v; ++i) csv << "t" << (i + 1) << ",";
    csv << "J_R";
    for (int i = 0; i < fam.v; ++i) csv << ",dir" << (i + 1);
    csv << "\n";
    for (const RealVec& t : box_sample_grid(fam, o.points, 1000)) {
      for (int i = 0; i < fam.v; ++i) csv << csv_number(t[i]) << ",";
      try {
        FisherReport r = rld_norm_channel(fam, t);
        csv << csv_number(r.value);
        for (int i = 0; i < fam.v; ++i) csv << "," << csv_number(r.direction[i]);
      } catch (const InfiniteFisher&) {
        csv << "inf";
        for (int i = 0; i < fam.v; ++i) csv << ",";
      }
      csv << "\n";
    }
    emit(o, csv.str());
    return exit_ok;
  }
  RealVec t = point_or(fam, o.t, 0.5);
  Json j;
  j["version"] = version;
  j["config"] = config_json(o, "fisher");
  try {
    FisherReport closed = rld_norm_channel(fam, t);
    FisherReport var = rld_norm_channel_variational(fam, t, o.restarts, o.seed);
    Json r;
    r["value"] = closed.value;
    r["direction"] = std::vector<double>(closed.direction.data(),
                                         closed.direction.data() + closed.direction.size());
    r["method"] = "choi_closed";
    r["grid_resolution"] = closed.grid_resolution;
    Json rv;
    rv["value"] = var.value;
    rv["method"] = "variational";
    rv["restarts"] = var.restarts;
    j["result"]["closed"] = r;
    j["result"]["variational"] = rv;
    j["result"]["infinite"] = false;
  } catch (const InfiniteFisher& e) {
    j["result"]["infinite"] = true;
    j["result"]["reason"] = e.what();
  }
  emit(o, json_text(j));
  return exit_ok;
}

int cmd_d2(const CommonOpts& o) {
  ChannelFamily fam = load_family_spec(o.family_path);
  RealVec t = point_or(fam, o.t, 1.0 / 3.0);
  RealVec t2 = point_or(fam, o.t2, 2.0 / 3.0);
  Channel a = fam.eval(t), b = fam.eval(t2);
  Json j;
  j["version"] = version;
  j["config"] = config_json(o, "d2");
  try {
    DivergenceReport closed = d2_channels_closed(a, b);
    DivergenceReport var = d2_channels_variational(a, b, o.restarts, o.seed);
    j["result"]["infinite"] = false;
    j["result"]["closed"] = {{"value_bits", closed.value_bits},
                             {"method", "closed_form"},
                             {"marginal_support", closed.marginal_support}};
    Json w;
    if (var.witness) w = matrix_to_json(Mat(*var.witness));
    j["result"]["variational"] = {{"value_bits", var.value_bits},
                                  {"method", "variational"},
                                  {"restarts_used", var.restarts_used},
                                  {"witness", w}};
  } catch (const SupportViolation& e) {
    j["result"]["infinite"] = true;
    j["result"]["reason"] = e.what();
  }
  emit(o, json_text(j));
  return exit_ok;
}

int cmd_protocol_sweep(const CommonOpts& o) {
  ChannelFamily fam = load_family_spec(o.family_path);
  std::vector<double> ns = o.n_list.empty() ? std::vector<double>{100, 1000, 10000} : o.n_list;
  RealVec t = point_or(fam, o.t, 0.5);
  std::vector<ProtocolRun> runs = protocol_sweep(fam, o.alpha, t, ns, o.seed);
  std::ostringstream csv;
  csv << csv_preamble(o, "protocol-sweep");
  csv << "n,alpha,v,spacing,num_points,cost_bits,err_upper,err_exact,err_lower,thm1_rate\n";
  for (const ProtocolRun& r : runs) {
    csv << csv_number(r.n) << "," << csv_number(r.alpha) << "," << fam.v << ","
        << csv_number(r.spacing) << "," << r.num_points << "," << r.cost_bits << ","
        << csv_number(r.err_upper) << ",";
    if (r.err_exact) csv << csv_number(*r.err_exact);
    csv << ",";
    if (r.err_lower) csv << csv_number(*r.err_lower);
    csv << "," << csv_number(r.thm1_rate) << "\n";
  }
  if (o.format == "json") {
    Json j;
    j["version"] = version;
    j["config"] = config_json(o, "protocol-sweep");
    Json rows = Json::array();
    for (const ProtocolRun& r : runs) {
      Json row;
      row["n"] = r.n;
      row["alpha"] = r.alpha;
      row["v"] = fam.v;
      row["spacing"] = r.spacing;
      row["num_points"] = r.num_points;
      row["cost_bits"] = r.cost_bits;
      row["err_upper"] = r.err_upper;
      if (r.err_exact) row["err_exact"] = *r.err_exact;
      if (r.err_lower) row["err_lower"] = *r.err_lower;
      row["thm1_rate"] = r.thm1_rate;
      rows.push_back(row);
    }
    j["result"] = rows;
    emit(o, json_text(j));
  } else {
    emit(o, csv.str());
  }
  return exit_ok;
}

int cmd_metrology_sim(const CommonOpts& o) {
  ChannelFamily fam = load_family_spec(o.family_path);
  if (fam.v != 1 || !fam.pauli_probs)
    throw std::invalid_argument(
        "metrology-sim: built-in estimation strategy needs a one-parameter Pauli-type family");
  std::vector<double> ns = o.n_list.empty() ? std::vector<double>{100, 1000} : o.n_list;
  RealVec t = point_or(fam, o.t, 0.5);
  ProductStrategy strat = mle_flip_strategy();
  std::ostringstream csv;
  csv << csv_preamble(o, "metrology-sim");
  csv << "n,trials,mse_empirical,mse_stderr,inaccuracy_p,mi_empirical,bound1,bound2,"
         "condition_ok\n";
  Json rows = Json::array();
  for (std::size_t i = 0; i < ns.size(); ++i) {
    ExperimentReport rep =
        estimation_experiment(fam, strat, t, static_cast<std::int64_t>(ns[i]), o.trials,
                              derive_seed(o.seed, i), o.confidence);
    csv << csv_number(ns[i]) << "," << o.trials << "," << csv_number(rep.mse_empirical) << ","
        << csv_number(rep.mse_stderr) << "," << csv_number(rep.inaccuracy_p) << ","
        << csv_number(rep.mi_empirical) << "," << csv_number(rep.mi_bounds.bound1) << ","
        << csv_number(rep.mi_bounds.bound2) << "," << (rep.mi_bounds.condition_ok ? 1 : 0)
        << "\n";
    Json row;
    row["n"] = ns[i];
    row["trials"] = o.trials;
    row["mse_empirical"] = rep.mse_empirical;
    row["mse_stderr"] = rep.mse_stderr;
    row["inaccuracy_p"] = rep.inaccuracy_p;
    row["mi_empirical"] = rep.mi_empirical;
    row["bound1"] = rep.mi_bounds.bound1;
    row["bound2"] = rep.mi_bounds.bound2;
    row["condition_ok"] = rep.mi_bounds.condition_ok;
    rows.push_back(row);
  }
  if (o.format == "json") {
    Json j;
    j["version"] = version;
    j["config"] = config_json(o, "metrology-sim");
    j["result"] = rows;
    emit(o, json_text(j));
  } else {
    emit(o, csv.str());
  }
  return exit_ok;
}

int cmd_bounds(const CommonOpts& o) {
  ChannelFamily fam = load_family_spec(o.family_path);
  BetaClass cls = classify_beta(fam);
  Json j;
  j["version"] = version;
  j["config"] = config_json(o, "bounds");
  j["result"]["v"] = fam.v;
  j["result"]["beta_class"] = cls == BetaClass::sql_one         ? "sql"
                              : cls == BetaClass::heisenberg_two ? "heisenberg"
                                                                 : "unknown";
  if (cls != BetaClass::unknown) {
    double beta = beta_value(cls);
    RateStatement sim = theorem1_rate(fam.v, beta, o.eps);
    RateStatement prog = corollary1_rate(fam.v, beta, o.eps);
    j["result"]["beta"] = beta;
    j["result"]["simulation_rate"] = {{"v", sim.v},
                                      {"beta", sim.beta},
                                      {"eps_threshold", sim.eps_threshold},
                                      {"rate", sim.rate}};
    j["result"]["communication_rate"] = {{"v", prog.v},
                                         {"beta", prog.beta},
                                         {"eps_threshold", prog.eps_threshold},
                                         {"rate", prog.rate}};
  }
  emit(o, json_text(j));
  return exit_ok;
}

int cmd_validate(const CommonOpts& o) {
  ChannelFamily fam = load_family_spec(o.family_path);
  std::ostringstream rep;
  rep << "family: " << fam.name << " (v=" << fam.v << ")\n";
  std::vector<RealVec> pts = box_sample_grid(fam);
  bool channels_ok = true;
  for (const RealVec& t : pts) {
    try {
      validate_channel(fam.eval(t));
    } catch (const std::exception&) {
      channels_ok = false;
      break;
    }
  }
  rep << "channel validity on sample grid: " << (channels_ok ? "pass" : "FAIL") << "\n";
  bool cond1 = true;
  try {
    cond1 = check_condition_derivative_support(fam, box_midpoint(fam), default_directions(fam.v));
  } catch (const std::exception&) {
    cond1 = false;
  }
  rep << "condition 1 (derivative support contained): " << (cond1 ? "pass" : "fail") << "\n";
  bool cond2 = true;
  std::string cond2_note;
  try {
    double j = jr_max(fam);
    cond2 = j > 0.0;
    cond2_note = " (J_max = " + std::to_string(j) + ")";
  } catch (const InfiniteFisher&) {
    cond2 = false;
    cond2_note = " (norm diverges)";
  }
  rep << "condition 2 (nonzero Fisher norm): " << (cond2 ? "pass" : "fail") << cond2_note
      << "\n";
  bool cond3 = check_condition_support_constant(fam, pts);
  rep << "condition 3 (constant Choi support): " << (cond3 ? "pass" : "fail") << "\n";
  BetaClass cls = classify_beta(fam, pts);
  rep << "beta class: "
      << (cls == BetaClass::sql_one         ? "1 (standard quantum limited)"
          : cls == BetaClass::heisenberg_two ? "2 (Heisenberg limited)"
                                             : "unknown")
      << "\n";
  emit(o, rep.str());
  if (!channels_ok) return exit_invariant;
  return exit_ok;
}

int cmd_acceptance(const CommonOpts& o) {
  std::ostringstream sink;
  acceptance::SuiteResult suite = acceptance::run(o.seed, &std::cout);
  if (!o.out_path.empty()) {
    std::ofstream out(o.out_path, std::ios::binary);
    out << suite.report_text;
  }
  return suite.all_pass ? exit_ok : exit_invariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"information quantities and lattice communication protocol for parametric "
               "channel families"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qchan::version));

  CommonOpts fisher_o, d2_o, proto_o, metro_o, bounds_o, validate_o, accept_o;
  CLI::App* fisher = app.add_subcommand("fisher", "RLD Fisher information norm");
  add_common(fisher, fisher_o);
  fisher->add_flag("--sweep", fisher_o.sweep, "emit a CSV sweep over the box");
  fisher->add_option("--points", fisher_o.points, "sweep points per axis");
  CLI::App* d2 = app.add_subcommand("d2", "channel 2-Renyi divergence");
  add_common(d2, d2_o);
  CLI::App* proto = app.add_subcommand("protocol-sweep", "lattice protocol cost/error sweep");
  add_common(proto, proto_o);
  CLI::App* metro = app.add_subcommand("metrology-sim", "Monte-Carlo estimation experiment");
  add_common(metro, metro_o);
  CLI::App* bounds = app.add_subcommand("bounds", "metrology rate statements");
  add_common(bounds, bounds_o);
  CLI::App* validate = app.add_subcommand("validate", "check family conditions");
  add_common(validate, validate_o);
  CLI::App* accept = app.add_subcommand("acceptance", "run the acceptance suite");
  add_common(accept, accept_o, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (fisher->parsed()) return cmd_fisher(fisher_o);
    if (d2->parsed()) return cmd_d2(d2_o);
    if (proto->parsed()) return cmd_protocol_sweep(proto_o);
    if (metro->parsed()) return cmd_metrology_sim(metro_o);
    if (bounds->parsed()) return cmd_bounds(bounds_o);
    if (validate->parsed()) return cmd_validate(validate_o);
    if (accept->parsed()) return cmd_acceptance(accept_o);
  } catch (const qchan::SpecParseError& e) {
    std::cerr << "spec error: " << e.what() << "\n";
    return exit_spec;
  } catch (const std::invalid_argument& e) {
    std::cerr << "spec error: " << e.what() << "\n";
    return exit_spec;
  } catch (const std::logic_error& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return exit_invariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_spec;
  }
  return exit_ok;
}
