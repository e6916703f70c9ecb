// Experiment runner and verification CLI.
//
// Subcommands:
//   sweep       regret of a policy roster over sequence families, to CSV
//   verify      machine-checkable invariant suites, pass/fail per check
//   lowerbound  competitive-ratio lower-bound constant and finite-n ratios
//   gen         sequence generation to file
//
// Exit codes: 0 all passed, 1 invariant failure, 2 usage error.

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "smartol/analysis.hpp"
#include "smartol/core.hpp"
#include "smartol/policies.hpp"
#include "smartol/sequences.hpp"
#include "smartol/small_loss.hpp"
#include "smartol/smart.hpp"
#include "smartol/verify.hpp"

namespace {

using nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string::npos ? std::string::npos
                                                           : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

// "start:stop:step" inclusive, or a comma-separated list.
std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    auto parts = split(spec, ':');
    if (parts.size() != 3) throw UsageError("grid must be start:stop:step or a comma list");
    double start = std::stod(parts[0]), stop = std::stod(parts[1]),
           step = std::stod(parts[2]);
    if (!(step > 0.0) || stop < start) throw UsageError("invalid grid range");
    for (int i = 0;; ++i) {
      double v = start + i * step;
      if (v > stop + 1e-12) break;
      out.push_back(v);
    }
  } else {
    for (const auto& tok : split(spec, ','))
      if (!tok.empty()) out.push_back(std::stod(tok));
  }
  if (out.empty()) throw UsageError("empty grid");
  return out;
}

std::size_t thread_count() {
  if (const char* env = std::getenv("SMARTOL_THREADS")) {
    long v = std::atol(env);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepOptions {
  std::string kind;
  std::size_t n = 1000;
  std::string grid = "";
  std::size_t seeds = 1;
  std::uint64_t seed_base = 0;
  std::string policies = "ftl,cover,smart_det";
  std::string g_mode = "exact";
  double kappa = smartol::kDefaultSmallLossKappa;
  std::size_t draws = 1;
  std::string out;
  std::string json_out;
};

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

// Flat key=value config; keys are the long flag names without the leading
// dashes. Flags given on the command line keep precedence.
void apply_config_file(const CLI::App& sweep, SweepOptions& opt, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(line_no) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (sweep.count("--" + key) > 0) continue;
    try {
      if (key == "kind") opt.kind = value;
      else if (key == "n") opt.n = std::stoul(value);
      else if (key == "grid") opt.grid = value;
      else if (key == "seeds") opt.seeds = std::stoul(value);
      else if (key == "seed-base") opt.seed_base = std::stoull(value);
      else if (key == "policies") opt.policies = value;
      else if (key == "g-mode") opt.g_mode = value;
      else if (key == "kappa") opt.kappa = std::stod(value);
      else if (key == "draws") opt.draws = std::stoul(value);
      else if (key == "out") opt.out = value;
      else if (key == "json") opt.json_out = value;
      else
        throw UsageError("config line " + std::to_string(line_no) + ": unknown key '" +
                         key + "'");
    } catch (const std::invalid_argument&) {
      throw UsageError("config line " + std::to_string(line_no) + ": bad value for '" +
                       key + "'");
    }
  }
}

struct SweepRow {
  double param = 0.0;
  std::uint64_t seed = 0;
  std::string policy;
  double regret = 0.0;
  std::vector<std::size_t> switch_times;
  double threshold = std::numeric_limits<double>::quiet_NaN();
};

const std::vector<std::string> kKnownPolicies = {
    "ftl", "cover", "hedge", "hedge_sl", "smart_det", "smart_rand", "smart_sl"};

int run_sweep(const SweepOptions& opt) {
  using namespace smartol;
  if (opt.kind != "bernoulli" && opt.kind != "lead_change" && opt.kind != "alternating")
    throw UsageError("unknown kind '" + opt.kind + "'");

  std::vector<double> params;
  if (opt.kind == "alternating") {
    params = {static_cast<double>(opt.n / 2)};
  } else {
    if (opt.grid.empty()) throw UsageError("--grid is required for kind " + opt.kind);
    params = parse_grid(opt.grid);
  }
  for (double p : params) {
    if (opt.kind == "bernoulli" && !(p >= 0.0 && p <= 1.0))
      throw UsageError("bernoulli grid value " + fmt(p) + " outside [0,1]");
    if (opt.kind == "lead_change" &&
        (p < 0.0 || p != std::floor(p) || 2.0 * p > static_cast<double>(opt.n)))
      throw UsageError("lead_change grid value " + fmt(p) + " invalid for n=" +
                       std::to_string(opt.n));
  }

  auto roster = split(opt.policies, ',');
  for (const auto& name : roster)
    if (std::find(kKnownPolicies.begin(), kKnownPolicies.end(), name) ==
        kKnownPolicies.end())
      throw UsageError("unknown policy '" + name + "'");
  if (roster.empty()) throw UsageError("empty policy roster");
  if (opt.seeds < 1) throw UsageError("--seeds must be >= 1");
  if (opt.draws < 1) throw UsageError("--draws must be >= 1");

  const std::size_t n = opt.n;
  const bool exact_g = opt.g_mode == "exact";
  if (!exact_g && opt.g_mode != "asymptotic")
    throw UsageError("--g-mode must be exact or asymptotic");
  auto g_fn = [exact_g](std::size_t k) {
    return exact_g ? rademacher_fn(static_cast<std::int64_t>(k))
                   : std::sqrt(static_cast<double>(k) / (2.0 * std::numbers::pi));
  };
  auto cover_factory = [](std::size_t horizon, std::size_t) {
    return std::make_unique<CoverPolicy>(horizon);
  };

  struct Cell {
    double param;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (double p : params)
    for (std::size_t s = 0; s < opt.seeds; ++s)
      cells.push_back({p, opt.seed_base + s});

  std::vector<std::vector<SweepRow>> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const Cell& cell = cells[i];
      BinarySequence seq;
      if (opt.kind == "bernoulli")
        seq = gen_bernoulli(n, cell.param, cell.seed);
      else
        seq = gen_lead_change(n, static_cast<std::size_t>(cell.param));
      LossMatrix losses = binary_to_losses(seq);

      FtlPolicy ftl(2);
      RunRecord ftl_rec = run_policy(ftl, losses);

      std::vector<SweepRow>& rows = results[i];
      for (const auto& name : roster) {
        SweepRow row;
        row.param = cell.param;
        row.seed = cell.seed;
        row.policy = name;
        if (name == "ftl") {
          row.regret = ftl_rec.regret;
        } else if (name == "cover") {
          CoverPolicy cover(n);
          row.regret = run_policy(cover, losses).regret;
        } else if (name == "hedge") {
          HedgePolicy h = HedgePolicy::worst_case(2, n);
          row.regret = run_policy(h, losses).regret;
        } else if (name == "hedge_sl") {
          HedgePolicy h = HedgePolicy::small_loss(2);
          row.regret = run_policy(h, losses).regret;
        } else if (name == "smart_det" || name == "smart_rand") {
          SmartConfig cfg;
          cfg.mode = name == "smart_det" ? SmartConfig::Threshold::kDeterministic
                                         : SmartConfig::Threshold::kRandomized;
          cfg.worst_case_bound = g_fn;
          cfg.make_alg_wc = cover_factory;
          cfg.seed = cell.seed ^ 0x9e3779b97f4a7c15ull;
          if (name == "smart_rand" && opt.draws > 1) {
            auto summary = smart_randomized_summary(losses, cfg, opt.draws);
            row.regret = summary.mean_regret;
          } else {
            RunRecord rec = smart_run(losses, cfg);
            row.regret = rec.regret;
            row.switch_times = rec.switch_times;
            row.threshold = rec.threshold;
          }
        } else if (name == "smart_sl") {
          SmallLossConfig cfg;
          cfg.kappa = opt.kappa;
          RunRecord rec = small_loss_smart_run(losses, cfg);
          row.regret = rec.regret;
          row.switch_times = rec.switch_times;
        }
        rows.push_back(std::move(row));
      }
    }
  };
  std::vector<std::thread> pool;
  std::size_t workers = std::min(thread_count(), cells.size());
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::ofstream csv(opt.out, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot open " + opt.out);
  csv << "sequence_kind,param,seed,policy,regret,switch_time,threshold_draw\n";
  for (const auto& rows : results)
    for (const auto& row : rows) {
      std::string switches;
      for (std::size_t k = 0; k < row.switch_times.size(); ++k) {
        if (k) switches += ';';
        switches += std::to_string(row.switch_times[k]);
      }
      csv << csv_quote(opt.kind) << ',' << fmt(row.param) << ',' << row.seed << ','
          << csv_quote(row.policy) << ',' << fmt(row.regret) << ','
          << csv_quote(switches) << ','
          << (std::isnan(row.threshold) ? "" : fmt(row.threshold)) << "\n";
    }
  csv.close();

  // Per-(param, policy) means plus the reference curves 2*Reg(FTL),
  // (e/(e-1))*Reg(FTL) and g(n).
  double g_n = g_fn(n);
  ordered_json summary = ordered_json::array();
  for (double p : params) {
    std::vector<double> ftl_regrets;
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (cells[i].param == p)
        for (const auto& row : results[i])
          if (row.policy == "ftl") ftl_regrets.push_back(row.regret);
    double mean_ftl = 0.0;
    for (double r : ftl_regrets) mean_ftl += r;
    if (!ftl_regrets.empty()) mean_ftl /= static_cast<double>(ftl_regrets.size());

    for (const auto& name : roster) {
      double mean = 0.0, sq = 0.0;
      std::size_t count = 0;
      for (std::size_t i = 0; i < cells.size(); ++i)
        if (cells[i].param == p)
          for (const auto& row : results[i])
            if (row.policy == name) {
              mean += row.regret;
              sq += row.regret * row.regret;
              ++count;
            }
      if (!count) continue;
      mean /= static_cast<double>(count);
      double var = sq / static_cast<double>(count) - mean * mean;
      ordered_json entry;
      entry["sequence_kind"] = opt.kind;
      entry["param"] = p;
      entry["policy"] = name;
      entry["runs"] = count;
      entry["mean_regret"] = mean;
      entry["std_regret"] = std::sqrt(std::max(0.0, var));
      entry["mean_ftl_regret"] = mean_ftl;
      entry["ref_two_ftl"] = 2.0 * mean_ftl;
      entry["ref_e_over_e1_ftl"] = std::numbers::e / (std::numbers::e - 1.0) * mean_ftl;
      entry["ref_g_n"] = g_n;
      summary.push_back(std::move(entry));
    }
  }
  ordered_json doc;
  doc["kind"] = opt.kind;
  doc["n"] = n;
  doc["seeds"] = opt.seeds;
  doc["seed_base"] = opt.seed_base;
  doc["policies"] = roster;
  doc["g_mode"] = opt.g_mode;
  doc["kappa"] = opt.kappa;
  doc["draws"] = opt.draws;
  doc["g_n"] = g_n;
  doc["summary"] = std::move(summary);
  std::string json_path = opt.json_out.empty() ? opt.out + ".summary.json" : opt.json_out;
  std::ofstream js(json_path, std::ios::binary);
  if (!js) throw std::runtime_error("cannot open " + json_path);
  js << doc.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// verify / lowerbound / gen

int run_verify(const std::string& suite) {
  std::vector<smartol::CheckResult> checks;
  try {
    checks = smartol::verify_suite(suite);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  bool all_pass = true;
  for (const auto& c : checks) {
    all_pass = all_pass && c.pass;
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name
              << " measured=" << fmt(c.measured) << " limit=" << fmt(c.limit) << "\n";
  }
  std::cout << (all_pass ? "OK" : "FAILED") << " " << checks.size() << " checks\n";
  return all_pass ? 0 : 1;
}

int run_lowerbound(const std::string& n_list) {
  std::vector<std::int64_t> ns;
  for (const auto& tok : split(n_list, ','))
    if (!tok.empty()) ns.push_back(std::stoll(tok));
  for (std::int64_t n : ns)
    if (n < 2 || n % 2 != 0) throw UsageError("horizons must be even and >= 2");
  auto rep = smartol::lower_bound_constant(ns);
  std::cout << "gamma_limit = " << fmt(rep.gamma_limit) << "\n";
  std::cout << "exp(-1/pi) = " << fmt(rep.exp_component) << "\n";
  std::cout << "Q(sqrt(2/pi)) = " << fmt(rep.q_component) << "\n";
  std::cout << "|gamma_limit - 1.4335| = " << fmt(std::abs(rep.gamma_limit - 1.4335))
            << "\n";
  for (const auto& [n, ratio] : rep.finite_n_ratios)
    std::cout << "finite_n_ratio(" << n << ") = " << fmt(ratio) << "\n";
  return 0;
}

struct GenOptions {
  std::string kind;
  std::size_t n = 1000;
  double p = 0.5;
  std::size_t c = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "bits";
};

int run_gen(const GenOptions& opt) {
  using namespace smartol;
  BinarySequence seq;
  if (opt.kind == "bernoulli") {
    if (!(opt.p >= 0.0 && opt.p <= 1.0)) throw UsageError("--p outside [0,1]");
    seq = gen_bernoulli(opt.n, opt.p, opt.seed);
    if (!bernoulli_mean_in_band(seq, opt.p))
      std::cerr << "warning: empirical mean outside the 4-sigma band around p="
                << fmt(opt.p) << "\n";
  } else if (opt.kind == "lead_change") {
    if (2 * opt.c > opt.n) throw UsageError("lead_change needs 2c <= n");
    seq = gen_lead_change(opt.n, opt.c);
  } else if (opt.kind == "alternating") {
    seq = gen_lead_change(opt.n, opt.n / 2);
  } else {
    throw UsageError("unknown kind '" + opt.kind + "'");
  }
  if (opt.format == "bits")
    save_bits(opt.out, seq);
  else if (opt.format == "csv")
    save_losses(opt.out, binary_to_losses(seq));
  else
    throw UsageError("--format must be bits or csv");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Instance-optimal online learning: experiments and verification"};
  app.require_subcommand(1);

  SweepOptions sweep_opt;
  std::string sweep_config;
  CLI::App* sweep = app.add_subcommand("sweep", "Run a policy roster over a sequence family");
  sweep->add_option("--config", sweep_config,
                    "flat key=value config file; flags override it");
  sweep->add_option("--kind", sweep_opt.kind, "bernoulli | lead_change | alternating");
  sweep->add_option("--n", sweep_opt.n, "horizon");
  sweep->add_option("--grid", sweep_opt.grid,
                    "parameter grid: start:stop:step or comma list");
  sweep->add_option("--seeds", sweep_opt.seeds, "seeds per parameter");
  sweep->add_option("--seed-base", sweep_opt.seed_base, "first seed");
  sweep->add_option("--policies", sweep_opt.policies,
                    "comma list: ftl,cover,hedge,hedge_sl,smart_det,smart_rand,smart_sl");
  sweep->add_option("--g-mode", sweep_opt.g_mode,
                    "threshold scale for switching policies: exact | asymptotic");
  sweep->add_option("--kappa", sweep_opt.kappa, "small-loss bound constant");
  sweep->add_option("--draws", sweep_opt.draws,
                    "threshold draws per cell for smart_rand (mean regret if > 1)");
  sweep->add_option("--out", sweep_opt.out, "output CSV path");
  sweep->add_option("--json", sweep_opt.json_out,
                    "summary JSON path (default: <out>.summary.json)");

  std::string suite = "all";
  CLI::App* verify = app.add_subcommand("verify", "Run an invariant suite");
  verify->add_option("suite", suite,
                     "identity | cover | crossings | lowerbound | smallloss | all");

  std::string n_list = "2,10,100,1000,10000,1000000";
  CLI::App* lowerbound =
      app.add_subcommand("lowerbound", "Competitive-ratio lower bound report");
  lowerbound->add_option("--n", n_list, "comma list of even horizons");

  GenOptions gen_opt;
  CLI::App* gen = app.add_subcommand("gen", "Generate a sequence to file");
  gen->add_option("--kind", gen_opt.kind, "bernoulli | lead_change | alternating")
      ->required();
  gen->add_option("--n", gen_opt.n, "length");
  gen->add_option("--p", gen_opt.p, "Bernoulli parameter");
  gen->add_option("--c", gen_opt.c, "lead-change pair count");
  gen->add_option("--seed", gen_opt.seed, "RNG seed");
  gen->add_option("--out", gen_opt.out, "output path")->required();
  gen->add_option("--format", gen_opt.format, "bits | csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(sweep)) {
      if (!sweep_config.empty()) apply_config_file(*sweep, sweep_opt, sweep_config);
      if (sweep_opt.kind.empty()) throw UsageError("--kind is required");
      if (sweep_opt.out.empty()) throw UsageError("--out is required");
      return run_sweep(sweep_opt);
    }
    if (app.got_subcommand(verify)) return run_verify(suite);
    if (app.got_subcommand(lowerbound)) return run_lowerbound(n_list);
    if (app.got_subcommand(gen)) return run_gen(gen_opt);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
