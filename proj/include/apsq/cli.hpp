#ifndef APSQ_CLI_HPP
#define APSQ_CLI_HPP

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "apsq/apsq.hpp"

#ifndef APSQ_VERSION
#define APSQ_VERSION "0.0.0"
#endif

namespace apsq::cli {

using Json = nlohmann::ordered_json;
using Params = std::map<std::string, std::string>;

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kViolation = 1;
inline constexpr int kUsage = 2;

struct CommandResult {
  Json payload;
  std::string text;
  int status = kOk;
};

struct OptionSpec {
  std::string name;
  std::optional<std::string> default_value;  // nullopt: required
  std::string help;
};

struct CommandSpec {
  std::string name;
  std::string help;
  std::vector<OptionSpec> options;
};

inline const std::vector<CommandSpec>& commands() {
  static const std::vector<CommandSpec> specs = {
      {"fermat-scan", "Search square pairs a < b <= max-root for 3- and 4-term square APs",
       {{"max-root", std::nullopt, "largest root b scanned"},
        {"list", "false", "emit every 3-term AP instead of a sample"}}},
      {"count-squares", "Square positions in a, a+d, ..., a+(n-1)d",
       {{"a", std::nullopt, "first term"},
        {"d", std::nullopt, "step (>= 1)"},
        {"n", std::nullopt, "length"},
        {"engine", "both", "naive, fast or both (cross-checked)"}}},
      {"qn", "Lower bound for Q(N) by search over steps and square roots",
       {{"n", std::nullopt, "AP length N"},
        {"d-max", std::nullopt, "largest step"},
        {"x-max", std::nullopt, "largest square root; all terms lie in [0, x-max^2]"}}},
      {"no4ap", "Largest subset of [0, N) without a 4-term AP",
       {{"n", std::nullopt, "N (<= 64)"}, {"budget", "2000000000", "search node budget, 0 = none"}}},
      {"bound", "floor((3N+3)/4)", {{"n", std::nullopt, "N"}}},
      {"erdos-rudin", "Squares in 24n+1 against sqrt(8N/3) for every N <= n-max",
       {{"n-max", std::nullopt, "largest N"}}},
      {"color-demo", "Monochromatic AP under the exponent-parity coloring",
       {{"k", std::nullopt, "number of primes"},
        {"n-max", std::nullopt, "search window [1, n-max]"},
        {"ell", "4", "AP length"}}},
      {"b-count", "Bounded-height census of six-fold products that are rational squares",
       {{"m", std::nullopt, "M (>= 6)"},
        {"h", std::nullopt, "height H"},
        {"zero", "true", "count solutions with a zero product"},
        {"list", "false", "emit every solution"}}},
      {"ledger", "Replay the interval-counting bound on one AP",
       {{"a", std::nullopt, "first term"},
        {"d", std::nullopt, "step"},
        {"n", std::nullopt, "length N"},
        {"m", std::nullopt, "block size M (>= 6)"},
        {"delta", "", "optional delta for the Q(N) < delta N report"}}},
      {"congruence", "All x mod m with x^2 = c (mod m)",
       {{"c", std::nullopt, "residue"}, {"m", std::nullopt, "modulus (>= 1)"}}},
  };
  return specs;
}

namespace detail {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const std::string& param(const Params& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) throw UsageError("missing parameter --" + key);
  return it->second;
}

inline Integer get_integer(const Params& p, const std::string& key) {
  const std::string& s = param(p, key);
  if (s.empty() || s.find_first_not_of("-0123456789") != std::string::npos ||
      s.find('-', 1) != std::string::npos || s == "-") {
    throw UsageError("--" + key + ": not an integer: '" + s + "'");
  }
  return Integer(s);
}

inline std::uint64_t get_u64(const Params& p, const std::string& key) {
  const Integer v = get_integer(p, key);
  auto out = to_u64(v);
  if (!out) throw UsageError("--" + key + ": out of range: " + v.str());
  return *out;
}

inline bool get_bool(const Params& p, const std::string& key) {
  const std::string& s = param(p, key);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw UsageError("--" + key + ": expected true or false, got '" + s + "'");
}

inline Json positions_json(const std::vector<std::uint64_t>& v) {
  Json a = Json::array();
  for (auto x : v) a.push_back(x);
  return a;
}

inline Json ap_json(const AP& ap) {
  return {{"first", ap.first.str()}, {"step", ap.step.str()}, {"length", ap.length}};
}

inline Json solution_json(const FaltingsSolution& s) {
  return {{"p", s.p.str()}, {"q", s.q.str()}, {"b", s.b}, {"product_zero", s.product_zero}};
}

inline std::string join(const std::vector<std::uint64_t>& v, std::size_t limit = 40) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size() && i < limit; ++i) os << (i ? " " : "") << v[i];
  if (v.size() > limit) os << " ... (" << v.size() << " total)";
  return os.str();
}

// ---------------------------------------------------------------------------
// Commands. Each maps parameters to a JSON payload plus a text rendering.

inline CommandResult cmd_fermat_scan(const Params& p, unsigned threads) {
  const std::uint64_t bound = get_u64(p, "max-root");
  const bool list = get_bool(p, "list");
  const FermatScanResult r = fermat_scan(bound, threads);
  auto has = [&r](std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return std::find(r.three_aps.begin(), r.three_aps.end(), ThreeSquareAP{a, b, c}) != r.three_aps.end();
  };
  CommandResult out;
  Json triples = Json::array();
  const std::size_t limit = list ? r.three_aps.size() : std::min<std::size_t>(10, r.three_aps.size());
  for (std::size_t i = 0; i < limit; ++i) {
    const auto& t = r.three_aps[i];
    triples.push_back({t.a * t.a, t.b * t.b, t.c * t.c, t.difference()});
  }
  out.payload["max_root"] = bound;
  if (r.four_ap_found) {
    const auto& f = *r.four_ap_found;
    out.payload["four_ap_found"] = {f.a * f.a, f.b * f.b, f.c * f.c, f.e * f.e, f.difference};
    out.status = kViolation;
  } else {
    out.payload["four_ap_found"] = nullptr;
  }
  out.payload["three_ap_census"] = r.three_ap_census();
  out.payload["contains_1_25_49"] = has(1, 5, 7);
  out.payload["contains_49_169_289"] = has(7, 13, 17);
  out.payload[list ? "three_aps" : "three_ap_sample"] = triples;

  std::ostringstream os;
  os << "fermat-scan: roots up to " << bound << "\n"
     << "  4-term square APs: " << (r.four_ap_found ? "FOUND (contract violation)" : "none") << "\n"
     << "  3-term square APs: " << r.three_ap_census() << "\n";
  for (std::size_t i = 0; i < std::min<std::size_t>(5, r.three_aps.size()); ++i) {
    const auto& t = r.three_aps[i];
    os << "    " << t.a * t.a << ", " << t.b * t.b << ", " << t.c * t.c << "  (d = " << t.difference() << ")\n";
  }
  out.text = os.str();
  return out;
}

inline CommandResult cmd_count_squares(const Params& p, unsigned) {
  const AP ap(get_integer(p, "a"), get_integer(p, "d"), get_u64(p, "n"));
  const std::string engine = param(p, "engine");
  if (engine != "naive" && engine != "fast" && engine != "both") {
    throw UsageError("--engine must be naive, fast or both");
  }
  CommandResult out;
  SquarePositions pos;
  bool agree = true;
  if (engine == "naive") {
    pos = square_positions_naive(ap);
  } else {
    pos = square_positions_fast(ap);
    if (engine == "both") agree = square_positions_naive(ap) == pos;
  }
  const auto four = find_4ap_in_set(pos.positions);
  out.payload["ap"] = ap_json(ap);
  out.payload["engine"] = engine;
  out.payload["count"] = pos.count();
  out.payload["positions"] = positions_json(pos.positions);
  if (engine == "both") out.payload["engines_agree"] = agree;
  out.payload["four_ap_in_positions"] = four ? Json(*four) : Json(nullptr);
  if (!agree || four) out.status = kViolation;

  std::ostringstream os;
  os << "count-squares: " << ap.first << " + " << ap.step << "n, 0 <= n < " << ap.length << "\n"
     << "  squares: " << pos.count() << "\n"
     << "  positions: " << join(pos.positions) << "\n";
  if (engine == "both") os << "  engines agree: " << (agree ? "yes" : "NO") << "\n";
  if (four) os << "  4-term AP among positions: FOUND (contract violation)\n";
  out.text = os.str();
  return out;
}

inline CommandResult cmd_qn(const Params& p, unsigned threads) {
  const std::uint64_t n = get_u64(p, "n");
  const QnLowerResult r = qn_lower_search(n, get_u64(p, "d-max"), get_u64(p, "x-max"), threads);
  CommandResult out;
  const auto four = find_4ap_in_set(r.witness.positions.positions);
  out.payload["n"] = n;
  out.payload["d_max"] = r.d_max;
  out.payload["x_max"] = r.x_max;
  out.payload["best_count"] = r.best_count;
  out.payload["lower_bound_only"] = true;
  out.payload["witness"] = {{"step", r.witness.step},
                            {"residue", r.witness.residue},
                            {"first", r.witness.first},
                            {"positions", positions_json(r.witness.positions.positions)}};
  Json per_step = Json::array();
  for (const auto& s : r.per_step) per_step.push_back(s.count);
  out.payload["per_step_best"] = per_step;
  out.payload["fermat_upper_bound"] = fermat_upper_bound(n).str();
  if (four) out.status = kViolation;

  std::ostringstream os;
  os << "qn: N = " << n << ", steps <= " << r.d_max << ", roots <= " << r.x_max << "\n"
     << "  best count (lower bound for Q(N)): " << r.best_count << "\n"
     << "  witness: first " << r.witness.first << ", step " << r.witness.step
     << ", positions " << join(r.witness.positions.positions) << "\n"
     << "  floor((3N+3)/4) = " << fermat_upper_bound(n) << "\n";
  out.text = os.str();
  return out;
}

inline CommandResult cmd_no4ap(const Params& p, unsigned threads) {
  const std::uint64_t n = get_u64(p, "n");
  No4APOptions opt;
  opt.node_budget = get_u64(p, "budget");
  opt.threads = threads;
  const No4APResult r = no4ap_max(n, opt);
  if (find_4ap_in_set(r.witness)) throw ContractViolation("no4ap: witness contains a 4-term AP");
  CommandResult out;
  out.payload["n"] = n;
  out.payload["max_size"] = r.max_size;
  out.payload["optimal"] = r.optimal;
  out.payload["witness"] = positions_json(r.witness);
  out.payload["fermat_upper_bound"] = fermat_upper_bound(n).str();
  std::ostringstream os;
  os << "no4ap: N = " << n << "\n"
     << "  max size: " << r.max_size << (r.optimal ? " (exact)" : " (budget exhausted, lower bound)") << "\n"
     << "  witness: " << join(r.witness) << "\n";
  out.text = os.str();
  return out;
}

inline CommandResult cmd_bound(const Params& p, unsigned) {
  const Integer n = get_integer(p, "n");
  const Integer b = fermat_upper_bound(n);
  CommandResult out;
  out.payload["n"] = n.str();
  out.payload["fermat_upper_bound"] = b.str();
  out.text = "floor((3N+3)/4) at N = " + n.str() + ": " + b.str() + "\n";
  return out;
}

inline CommandResult cmd_erdos_rudin(const Params& p, unsigned) {
  const ErdosRudinCensus c = erdos_rudin_census(get_u64(p, "n-max"));
  CommandResult out;
  out.payload["n_max"] = c.n_max;
  out.payload["final_count"] = c.entries.back().count;
  out.payload["max_abs_deviation"] = c.max_abs_deviation;
  out.payload["argmax_n"] = c.argmax_n;
  out.payload["all_within_one"] = c.all_within_one();
  out.payload["violations"] = positions_json(c.violations);
  std::ostringstream os;
  os.precision(6);
  os << "erdos-rudin: squares in 24n+1, N <= " << c.n_max << "\n"
     << "  count at N = " << c.n_max << ": " << c.entries.back().count << "\n"
     << "  max |count - sqrt(8N/3)|: " << c.max_abs_deviation << " at N = " << c.argmax_n << "\n"
     << "  within one for every N: " << (c.all_within_one() ? "yes" : "no") << "\n";
  if (!c.all_within_one()) os << "  violations: " << join(c.violations) << "\n";
  out.text = os.str();
  return out;
}

inline CommandResult cmd_color_demo(const Params& p, unsigned threads) {
  const std::uint64_t k = get_u64(p, "k");
  const std::uint64_t n = get_u64(p, "n-max");
  const std::uint64_t ell = get_u64(p, "ell");
  if (k < 1 || k > 64) throw UsageError("--k must be in [1, 64]");
  if (ell < 3) throw UsageError("--ell must be >= 3");
  CommandResult out;
  out.payload["k"] = k;
  out.payload["n_max"] = n;
  out.payload["ell"] = ell;
  std::ostringstream os;
  os << "color-demo: k = " << k << ", window [1, " << n << "], length " << ell << "\n";
  if (n < ell) {
    out.payload["mono_ap"] = nullptr;
    os << "  no monochromatic AP (window too short)\n";
    out.text = os.str();
    return out;
  }
  const ColorTable table(n, k);
  const auto m = find_mono_ap(table, ell, threads);
  const auto smooth = ell >= 4 ? find_smooth_mono_ap(table, ell) : std::nullopt;
  out.payload["smooth_mono_ap"] = smooth ? Json{{"A", smooth->A.str()}, {"D", smooth->D.str()}} : Json(nullptr);
  if (smooth) out.status = kViolation;
  if (!m) {
    out.payload["mono_ap"] = nullptr;
    os << "  no monochromatic AP found\n";
    out.text = os.str();
    return out;
  }
  const WitnessReport w = witness_check(*m, k);
  out.payload["mono_ap"] = {{"A", m->A.str()}, {"D", m->D.str()}, {"length", m->length}, {"color", m->color.bits}};
  Json terms = Json::array();
  for (const auto& t : w.per_term) {
    terms.push_back({{"term", t.term.str()}, {"smooth", t.smooth}, {"parity_even_after_R", t.parity_even_after_R}});
  }
  out.payload["witness"] = {{"R", w.R.str()},
                            {"divides_A", w.divides_A},
                            {"divides_D", w.divides_D},
                            {"per_term", terms},
                            {"all_terms_smooth", w.all_terms_smooth}};
  if (!w.divides_A || !w.divides_D || (ell >= 4 && w.all_terms_smooth)) out.status = kViolation;

  os << "  A = " << m->A << ", D = " << m->D << ", color (";
  for (std::size_t j = 0; j < m->color.bits.size(); ++j) os << (j ? "," : "") << int(m->color.bits[j]);
  os << ")\n  R = " << w.R << ", R | A: " << (w.divides_A ? "yes" : "no")
     << ", R | D: " << (w.divides_D ? "yes" : "no") << "\n";
  for (const auto& t : w.per_term) {
    os << "    " << t.term << ": smooth " << (t.smooth ? "yes" : "no") << ", even after R "
       << (t.parity_even_after_R ? "yes" : "no") << "\n";
  }
  os << "  all terms smooth: " << (w.all_terms_smooth ? "yes" : "no") << "\n";
  out.text = os.str();
  return out;
}

inline CommandResult cmd_b_count(const Params& p, unsigned threads) {
  const BCountResult r = b_count_search(get_u64(p, "m"), get_u64(p, "h"), get_bool(p, "zero"), threads);
  const bool list = get_bool(p, "list");
  CommandResult out;
  out.payload["m"] = r.m;
  out.payload["h"] = r.h;
  out.payload["include_zero"] = r.include_zero;
  out.payload["count"] = r.count();
  out.payload["zero_solutions"] = r.zero_solutions;
  Json sols = Json::array();
  for (const auto& s : r.solutions) {
    if (list || !s.product_zero) sols.push_back(solution_json(s));
  }
  out.payload[list ? "solutions" : "nonzero_solutions"] = sols;
  std::ostringstream os;
  os << "b-count: M = " << r.m << ", H = " << r.h << ", zero products " << (r.include_zero ? "included" : "excluded")
     << "\n  census: " << r.count() << " (" << r.zero_solutions << " with zero product)\n";
  for (const auto& s : r.solutions) {
    if (s.product_zero) continue;
    os << "    x = " << s.p << "/" << s.q << ", b = " << apsq::detail::tuple_str(s.b) << "\n";
  }
  out.text = os.str();
  return out;
}

inline CommandResult cmd_ledger(const Params& p, unsigned) {
  LedgerOptions opt;
  if (const std::string& d = param(p, "delta"); !d.empty()) {
    try {
      std::size_t used = 0;
      opt.delta = std::stod(d, &used);
      if (used != d.size() || !(*opt.delta > 0)) throw std::invalid_argument(d);
    } catch (const std::exception&) {
      throw UsageError("--delta: expected a positive number, got '" + d + "'");
    }
  }
  const LedgerReport r = ledger_run(get_integer(p, "a"), get_integer(p, "d"), get_u64(p, "n"), get_u64(p, "m"), opt);
  CommandResult out;
  const auto& v = r.verdicts;
  Json sols = Json::array();
  for (const auto& s : r.solutions) sols.push_back(solution_json(s));
  out.payload["ap"] = {{"a", r.a.str()}, {"d", r.d.str()}, {"n", r.n}};
  out.payload["m"] = r.m;
  out.payload["k"] = r.k;
  out.payload["square_count"] = r.positions.size();
  out.payload["interval_sizes"] = positions_json(r.interval_sizes);
  out.payload["big_intervals"] = positions_json(r.big_intervals);
  out.payload["binomial_sum"] = r.binomial_sum.str();
  out.payload["solutions"] = sols;
  out.payload["distinct_solutions"] = r.distinct_solutions;
  out.payload["five_k"] = r.five_k.str();
  out.payload["b_used"] = r.b_used.str();
  out.payload["final_bound"] = r.final_bound.str();
  out.payload["verdicts"] = {{"sizes_sum_to_total", v.sizes_sum_to_total},
                             {"per_interval_r_bound", v.per_interval_r_bound},
                             {"total_le_5k_plus_binomials", v.total_le_5k_plus_binomials},
                             {"binomials_equal_generated", v.binomials_equal_generated},
                             {"generated_distinct", v.generated_distinct},
                             {"products_are_squares", v.products_are_squares},
                             {"substitution_round_trip", v.substitution_round_trip},
                             {"total_le_5k_plus_b", v.total_le_5k_plus_b},
                             {"k_le_n_over_m_plus_1", v.k_le_n_over_m_plus_1},
                             {"all", v.all()}};
  if (r.delta) {
    out.payload["delta"] = {{"delta", r.delta->delta},
                            {"m_exceeds_six_over_delta", r.delta->m_exceeds_six_over_delta},
                            {"n_at_least_m_b_plus_5", r.delta->n_at_least_m_b_plus_5},
                            {"implies_below_delta_n", r.delta->implies_below_delta_n}};
  } else {
    out.payload["delta"] = nullptr;
  }
  std::ostringstream os;
  os << "ledger: " << r.a << " + " << r.d << "n, N = " << r.n << ", M = " << r.m << ", k = " << r.k << "\n"
     << "  squares |N| = " << r.positions.size() << ", interval sizes " << join(r.interval_sizes) << "\n"
     << "  intervals with >= 6 squares: " << r.big_intervals.size() << ", sum C(r,6) = " << r.binomial_sum << "\n"
     << "  generated solutions: " << r.solutions.size() << " (distinct " << r.distinct_solutions << ")\n"
     << "  |N| = " << r.positions.size() << " <= 5k + B = " << r.five_k << " + " << r.b_used << " = "
     << r.final_bound << "\n"
     << "  all verdicts: " << (v.all() ? "true" : "false") << "\n";
  if (r.delta) {
    os << "  delta = " << r.delta->delta << ": M > 6/delta " << (r.delta->m_exceeds_six_over_delta ? "yes" : "no")
       << ", N >= M(B+5) " << (r.delta->n_at_least_m_b_plus_5 ? "yes" : "no") << "\n";
  }
  out.text = os.str();
  return out;
}

inline CommandResult cmd_congruence(const Params& p, unsigned) {
  const Integer c = get_integer(p, "c");
  const Integer m = get_integer(p, "m");
  const ResidueClasses r = solve_square_congruence(c, m);
  CommandResult out;
  Json roots = Json::array();
  for (const auto& x : r.roots) roots.push_back(x.str());
  out.payload["c"] = c.str();
  out.payload["m"] = m.str();
  out.payload["roots"] = roots;
  std::ostringstream os;
  os << "x^2 = " << c << " (mod " << m << "): " << r.roots.size() << " roots\n  ";
  for (std::size_t i = 0; i < r.roots.size() && i < 64; ++i) os << (i ? " " : "") << r.roots[i];
  if (r.roots.size() > 64) os << " ...";
  os << "\n";
  out.text = os.str();
  return out;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace detail

/// Runs one subcommand from its parameter map. Library exceptions map to
/// exit codes: contract violations to 1, domain and usage errors to 2.
inline CommandResult execute(const std::string& command, const Params& params, unsigned threads) {
  using Fn = CommandResult (*)(const Params&, unsigned);
  static const std::map<std::string, Fn> table = {
      {"fermat-scan", detail::cmd_fermat_scan}, {"count-squares", detail::cmd_count_squares},
      {"qn", detail::cmd_qn},                   {"no4ap", detail::cmd_no4ap},
      {"bound", detail::cmd_bound},             {"erdos-rudin", detail::cmd_erdos_rudin},
      {"color-demo", detail::cmd_color_demo},   {"b-count", detail::cmd_b_count},
      {"ledger", detail::cmd_ledger},           {"congruence", detail::cmd_congruence},
  };
  auto it = table.find(command);
  if (it == table.end()) throw detail::UsageError("unknown command '" + command + "'");
  return it->second(params, threads);
}

/// One line of the JSONL store.
inline Json make_record(const std::string& command, const Params& params, const Json& payload,
                        double wall_seconds) {
  Json rec;
  rec["command"] = command;
  rec["params"] = params;
  rec["result"] = payload;
  rec["version"] = APSQ_VERSION;
  rec["wall_time_s"] = wall_seconds;
  rec["timestamp"] = detail::utc_timestamp();
  rec["seed"] = nullptr;
  return rec;
}

namespace detail {

inline int replay(const std::string& path, unsigned threads, std::ostream& out, std::ostream& err) {
  std::ifstream in(path);
  if (!in) {
    err << "replay: cannot open " << path << "\n";
    return kUsage;
  }
  std::string line;
  std::size_t index = 0, mismatches = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++index;
    Json rec;
    try {
      rec = Json::parse(line);
    } catch (const Json::parse_error& e) {
      err << "replay: record " << index << ": " << e.what() << "\n";
      return kUsage;
    }
    const std::string command = rec.at("command").get<std::string>();
    const Params params = rec.at("params").get<Params>();
    CommandResult r;
    try {
      r = execute(command, params, threads);
    } catch (const ContractViolation& e) {
      err << "replay: record " << index << ": " << e.what() << "\n";
      ++mismatches;
      continue;
    }
    const bool same = r.payload.dump() == rec.at("result").dump();
    mismatches += !same;
    out << "record " << index << " (" << command << "): " << (same ? "reproduced" : "MISMATCH") << "\n";
  }
  out << index - mismatches << "/" << index << " records reproduced\n";
  return mismatches == 0 ? kOk : kViolation;
}

}  // namespace detail

/// Full command line: `apsquares <command> [options] [--json] [--store FILE] [--threads N]`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Squares in arithmetic progressions: searches, censuses and proof replays", "apsquares"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  app.fallthrough();
  bool json = false;
  std::string store;
  if (const char* env = std::getenv("APSQUARES_STORE")) store = env;
  unsigned threads = 0;
  app.add_flag("--json", json, "print the machine-readable payload");
  app.add_option("--store", store, "append a run record to this JSONL file (default $APSQUARES_STORE)");
  app.add_option("--threads", threads, "worker cap; 0 = all cores")->check(CLI::NonNegativeNumber);
  app.set_version_flag("--version", APSQ_VERSION);

  std::map<std::string, Params> values;
  std::map<std::string, CLI::App*> subs;
  for (const auto& spec : commands()) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.help);
    subs[spec.name] = sub;
    Params& params = values[spec.name];
    for (const auto& o : spec.options) {
      std::string& slot = params[o.name];
      auto* opt = sub->add_option("--" + o.name, slot, o.help);
      if (o.default_value) {
        slot = *o.default_value;
        opt->capture_default_str();
      } else {
        opt->required();
      }
    }
  }
  std::string replay_path;
  CLI::App* replay = app.add_subcommand("replay", "Re-execute every record in a store and compare payloads");
  replay->add_option("file", replay_path, "JSONL store")->required();

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << APSQ_VERSION << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "apsquares: " << e.what() << "\n";
    return kUsage;
  }

  if (replay->parsed()) return detail::replay(replay_path, threads, out, err);

  std::string command;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) command = name;
  }
  const Params& params = values[command];
  try {
    const auto start = std::chrono::steady_clock::now();
    CommandResult r = execute(command, params, threads);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (json) {
      Json doc;
      doc["command"] = command;
      doc["params"] = params;
      doc["result"] = r.payload;
      out << doc.dump() << "\n";
    } else {
      out << r.text;
    }
    if (!store.empty()) {
      std::ofstream f(store, std::ios::app | std::ios::binary);
      if (!f) {
        err << "apsquares: cannot append to " << store << "\n";
        return kUsage;
      }
      f << make_record(command, params, r.payload, wall).dump() << "\n";
    }
    return r.status;
  } catch (const ContractViolation& e) {
    err << "apsquares: contract violation: " << e.what() << "\n";
    return kViolation;
  } catch (const detail::UsageError& e) {
    err << "apsquares: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    err << "apsquares: " << e.what() << "\n";
    return kUsage;
  } catch (const BudgetExceeded& e) {
    err << "apsquares: " << e.what() << "\n";
    return kUsage;
  }
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace apsq::cli

#endif  // APSQ_CLI_HPP
