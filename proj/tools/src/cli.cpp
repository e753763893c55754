#include "resparse_cli/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "resparse/edge_list.hpp"
#include "resparse/error.hpp"
#include "resparse/game.hpp"
#include "resparse/graph.hpp"
#include "resparse/leverage.hpp"
#include "resparse/linalg.hpp"
#include "resparse/parallel.hpp"
#include "resparse/presets.hpp"
#include "resparse/streaming.hpp"

namespace resparse::cli {
namespace {

using nlohmann::json;

struct Options {
  Seed seed = 0;
  int threads = 0;
  std::string manifest;
  std::string replay;
  bool desk = false;
  std::optional<double> beta_coeff, buffer_coeff, alpha_coeff, stop_coeff, estimate_ratio;
  std::optional<double> c0, c_k, c_alpha;
  std::optional<std::size_t> t_override;

  // gen
  std::string family;
  std::size_t n = 0;
  double p = 0.5;
  std::string out;

  // stream, parallel
  std::string in;
  double epsilon = 0.25;
  double delta_jl = 0.25;
  std::string leverage = "auto";
  bool assert_space = false;
  std::string round_log;
  bool forests = false;
  std::optional<std::size_t> max_rounds;

  // verify
  std::string g_path;
  std::string h_path;

  // game
  std::string rows_path;
  std::string game_family = "complete";
  std::size_t game_n = 8;
  std::string strategy = "halving";
  std::size_t trials = 100;
  bool strict = false;
  unsigned halvings = 3;
  std::size_t max_moves = 10000000;
  std::size_t check_every = 1;
  std::string mode = "coupled";
  std::string histogram;
  std::string trace;
};

// What a command read and wrote, for the manifest.
struct Record {
  json config = json::object();
  json metrics = json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  int exit_code = kOk;
};

std::uint64_t fnv1a(const char* data, std::size_t size, std::uint64_t h = 1469598103934665603ull) {
  for (std::size_t i = 0; i < size; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("write failed for " + path);
}

WeightedGraph load_graph(const std::string& path, Record& rec) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  rec.inputs.push_back(path);
  return read_edge_list(in);
}

void emit(const std::string& path, const std::string& text, Record& rec, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  write_file(path, text);
  rec.outputs.push_back(path);
}

Constants resolve(const Options& o) {
  Constants c = o.desk ? desk_constants() : default_constants();
  if (o.beta_coeff) c.beta_coeff = *o.beta_coeff;
  if (o.buffer_coeff) c.buffer_coeff = *o.buffer_coeff;
  if (o.alpha_coeff) c.alpha_coeff = *o.alpha_coeff;
  if (o.stop_coeff) c.stop_coeff = *o.stop_coeff;
  if (o.estimate_ratio) c.estimate_ratio = *o.estimate_ratio;
  if (o.c0) c.c0 = *o.c0;
  if (o.c_k) c.c_k = *o.c_k;
  if (o.c_alpha) c.c_alpha = *o.c_alpha;
  if (o.t_override) c.t_override = o.t_override;
  return c;
}

json constants_json(const Constants& c) {
  json j = {{"beta_coeff", c.beta_coeff},     {"buffer_coeff", c.buffer_coeff},
            {"alpha_coeff", c.alpha_coeff},   {"stop_coeff", c.stop_coeff},
            {"estimate_ratio", c.estimate_ratio}, {"c0", c.c0},
            {"c_k", c.c_k},                   {"c_alpha", c.c_alpha}};
  j["t_override"] = c.t_override ? json(*c.t_override) : json(nullptr);
  return j;
}

std::string num(double x) { return format_weight(x); }

// ---------------------------------------------------------------------------

void cmd_gen(const Options& o, Record& rec, std::ostream& out) {
  const auto family = parse_family(o.family);
  if (!family) throw InputError("unknown graph family '" + o.family + "'");
  const WeightedGraph g = generate(*family, o.n, o.seed, o.p);
  rec.config = {{"family", o.family}, {"n", o.n}, {"p", o.p}};
  rec.metrics = {{"vertices", g.num_vertices()}, {"edges", g.num_edges()}};
  emit(o.out, format_edge_list(g), rec, out);
  if (!o.out.empty() && o.out != "-") {
    out << "vertices " << g.num_vertices() << "\nedges " << g.num_edges() << '\n';
  }
}

LeverageMode parse_leverage(const std::string& s) {
  if (s == "auto") return LeverageMode::automatic;
  if (s == "exact") return LeverageMode::exact;
  if (s == "sketched") return LeverageMode::sketched;
  throw InputError("unknown leverage mode '" + s + "'");
}

void cmd_stream(const Options& o, Record& rec, std::ostream& out) {
  const Constants c = resolve(o);
  StreamConfig cfg = stream_config(c, o.epsilon, o.seed);
  cfg.delta_jl = o.delta_jl;
  cfg.leverage_mode = parse_leverage(o.leverage);
  cfg.assert_space = o.assert_space;

  std::ifstream in(o.in, std::ios::binary);
  if (!in) throw InputError("cannot open " + o.in);
  rec.inputs.push_back(o.in);
  EdgeListReader reader(in);
  EdgeReaderRowStream rows(reader);
  const StreamGraphResult res = stream_sparsify_graph(rows, cfg);

  rec.config = {{"epsilon", o.epsilon}, {"delta_jl", o.delta_jl}, {"leverage", o.leverage},
                {"assert_space", o.assert_space}, {"constants", constants_json(c)}};
  const std::size_t peak = res.stats.peak_rows;
  rec.metrics = {{"rows_consumed", res.stats.rows_consumed},
                 {"resparsifications", res.stats.rounds.size()},
                 {"peak_buffer_rows", peak},
                 {"space_bound", res.stats.threshold + 1.0},
                 {"edges_out", res.graph.num_edges()}};
  emit(o.out, format_edge_list(res.graph), rec, out);
  if (!o.out.empty() && o.out != "-") {
    out << "rows_consumed " << res.stats.rows_consumed << '\n'
        << "beta " << num(res.stats.beta) << '\n'
        << "resparsifications " << res.stats.rounds.size() << '\n'
        << "peak_buffer_rows " << peak << '\n'
        << "space_bound " << num(res.stats.threshold + 1.0) << '\n'
        << "edges_out " << res.graph.num_edges() << '\n';
  }
}

void cmd_parallel(const Options& o, Record& rec, std::ostream& out) {
  const Constants c = resolve(o);
  ParallelConfig cfg = parallel_config(c, o.epsilon, o.seed);
  cfg.max_rounds = o.max_rounds;
  cfg.track_forests = o.forests;
  const WeightedGraph g = load_graph(o.in, rec);
  const ParallelResult res = parallel_sparsify(g, cfg);

  rec.config = {{"epsilon", o.epsilon}, {"constants", constants_json(c)}, {"forests", o.forests}};
  rec.config["max_rounds"] = o.max_rounds ? json(*o.max_rounds) : json(nullptr);
  rec.metrics = {{"edges_in", g.num_edges()}, {"edges_out", res.graph.num_edges()},
                 {"rounds", res.rounds.size()}, {"threshold", res.threshold}};
  if (!res.rounds.empty() && res.rounds.back().epsilon_star) {
    rec.metrics["epsilon_star"] = *res.rounds.back().epsilon_star;
  }
  std::optional<std::size_t> forest_count;
  if (o.forests && !res.rounds.empty()) {
    forest_count = forest_decomposition(g, res).forests.size();
    rec.metrics["forests"] = *forest_count;
  }
  if (!o.round_log.empty()) {
    std::ostringstream csv;
    write_round_log_csv(csv, res);
    write_file(o.round_log, csv.str());
    rec.outputs.push_back(o.round_log);
  }
  emit(o.out, format_edge_list(res.graph), rec, out);
  if (!o.out.empty() && o.out != "-") {
    out << "alpha " << num(res.alpha) << '\n'
        << "threshold " << num(res.threshold) << '\n'
        << "rounds " << res.rounds.size() << '\n'
        << "edges_in " << g.num_edges() << '\n'
        << "edges_out " << res.graph.num_edges() << '\n';
    if (!res.rounds.empty() && res.rounds.back().epsilon_star) {
      out << "epsilon_star " << num(*res.rounds.back().epsilon_star)
          << (res.rounds.back().epsilon_lower_bound ? " (lower bound)" : "") << '\n';
    }
    if (forest_count) out << "forests " << *forest_count << '\n';
  }
}

void cmd_verify(const Options& o, Record& rec, std::ostream& out) {
  const WeightedGraph g = load_graph(o.g_path, rec);
  const WeightedGraph h = load_graph(o.h_path, rec);
  if (g.num_vertices() != h.num_vertices()) throw InputError("vertex counts differ");

  std::map<std::pair<Vertex, Vertex>, long> support;
  for (const Edge& e : g.edges()) ++support[std::minmax(e.u, e.v)];
  bool subset = true;
  for (const Edge& e : h.edges()) {
    if (--support[std::minmax(e.u, e.v)] < 0) subset = false;
  }
  const SpectralError err = spectral_epsilon(g, h, o.seed);
  out << "vertices " << g.num_vertices() << '\n'
      << "edges_g " << g.num_edges() << '\n'
      << "edges_h " << h.num_edges() << '\n'
      << "support " << (subset ? "subset" : "not_subset") << '\n'
      << "epsilon_star " << num(err.epsilon) << (err.lower_bound ? " (lower bound)" : "") << '\n';
  rec.metrics = {{"edges_g", g.num_edges()}, {"edges_h", h.num_edges()}, {"subset", subset},
                 {"epsilon_star", err.epsilon}, {"lower_bound", err.lower_bound}};
  if (g.num_vertices() <= dense_cap()) {
    const std::size_t c = connected_components(g).count;
    out << "leverage_sum_g " << num(exact_leverage(g).sum()) << " (expected "
        << g.num_vertices() - c << ")\n"
        << "leverage_sum_h " << num(exact_leverage(h).sum()) << " (expected "
        << h.num_vertices() - connected_components(h).count << ")\n";
  } else {
    out << "leverage_sums skipped above dense cap\n";
  }
  if (!subset) rec.exit_code = kContractViolation;
}

void cmd_game(const Options& o, Record& rec, std::ostream& out) {
  const Constants c = resolve(o);
  std::vector<Row> base;
  std::size_t n = 0;
  if (!o.rows_path.empty()) {
    const WeightedGraph g = load_graph(o.rows_path, rec);
    n = g.num_vertices();
    base = graph_rows(g);
  } else {
    const auto family = parse_family(o.game_family);
    if (!family) throw InputError("unknown graph family '" + o.game_family + "'");
    const WeightedGraph g = generate(*family, o.game_n, o.seed, o.p);
    n = g.num_vertices();
    base = graph_rows(g);
  }
  if (o.strategy != "halving" && o.strategy != "random") {
    throw InputError("unknown strategy '" + o.strategy + "'");
  }
  if (o.mode != "coupled" && o.mode != "fresh") throw InputError("unknown mode '" + o.mode + "'");

  GameConfig cfg = game_config(c, o.epsilon);
  cfg.mode = o.mode == "coupled" ? RandomnessMode::coupled : RandomnessMode::fresh;
  cfg.strict = o.strict;
  cfg.check = o.check_every == 0 ? WinCheck::at_end
              : o.check_every == 1 ? WinCheck::every_move
                                   : WinCheck::every_k;
  cfg.check_every = std::max<std::size_t>(o.check_every, 1);
  const double alpha = game_alpha(n, o.epsilon, c.c_alpha);
  const std::vector<Row> rows = o.halvings > 0 ? split_for_game(n, base, alpha, o.halvings) : base;

  std::vector<GameResult> results(o.trials);
  std::vector<MoveRecord> first_trace;
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(o.trials); ++t) {
    try {
      const auto trial = static_cast<std::uint64_t>(t);
      Game game(rows, cfg, derive_seed(o.seed, trial));
      const AdversaryStrategy strategy = o.strategy == "halving"
                                             ? halving_schedule()
                                             : uniform_random_legal(derive_seed(o.seed, trial, 1));
      results[static_cast<std::size_t>(t)] = run_strategy(game, strategy, o.max_moves);
      if (t == 0) first_trace = game.trace().moves;
    } catch (...) {
#pragma omp critical(resparse_cli_game)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  const double bound = 16.0 / alpha;
  std::size_t wins = 0, within = 0, capped = 0;
  double max_eps = 0.0, max_w = 0.0, moves = 0.0;
  for (const GameResult& r : results) {
    wins += r.verdict == Verdict::adversary_won;
    within += r.final_norm_w <= bound;
    capped += r.hit_move_cap;
    max_eps = std::max(max_eps, r.max_epsilon);
    max_w = std::max(max_w, r.final_norm_w);
    moves += static_cast<double>(r.moves);
  }
  const double trials = static_cast<double>(std::max<std::size_t>(o.trials, 1));
  out << "rows " << rows.size() << '\n'
      << "alpha " << num(alpha) << '\n'
      << "trials " << o.trials << '\n'
      << "wins " << wins << '\n'
      << "win_rate " << num(static_cast<double>(wins) / trials) << '\n'
      << "max_epsilon_star " << num(max_eps) << '\n'
      << "max_norm_w " << num(max_w) << '\n'
      << "norm_w_bound " << num(bound) << '\n'
      << "trials_within_bound " << within << '\n'
      << "mean_moves " << num(moves / trials) << '\n';
  if (capped > 0) out << "trials_hit_move_cap " << capped << '\n';

  rec.config = {{"family", o.rows_path.empty() ? o.game_family : std::string()},
                {"n", n}, {"epsilon", o.epsilon}, {"strategy", o.strategy},
                {"trials", o.trials}, {"strict", o.strict}, {"halvings", o.halvings},
                {"mode", o.mode}, {"check_every", o.check_every}, {"max_moves", o.max_moves},
                {"constants", constants_json(c)}};
  rec.metrics = {{"wins", wins}, {"win_rate", static_cast<double>(wins) / trials},
                 {"max_epsilon_star", max_eps}, {"max_norm_w", max_w},
                 {"trials_within_bound", within}};

  if (!o.histogram.empty()) {
    constexpr int kBins = 20;
    std::vector<std::size_t> count(kBins + 1, 0);
    for (const GameResult& r : results) {
      ++count[static_cast<std::size_t>(std::min(kBins, static_cast<int>(r.max_epsilon / 0.05)))];
    }
    std::ostringstream csv;
    csv << "bin_lo,bin_hi,count\n";
    for (int b = 0; b <= kBins; ++b) {
      csv << num(0.05 * b) << ',' << (b == kBins ? std::string("inf") : num(0.05 * (b + 1))) << ','
          << count[static_cast<std::size_t>(b)] << '\n';
    }
    write_file(o.histogram, csv.str());
    rec.outputs.push_back(o.histogram);
  }
  if (!o.trace.empty() && o.trials > 0) {
    std::ostringstream csv;
    write_trace_csv(csv, GameTrace{first_trace, {}});
    write_file(o.trace, csv.str());
    rec.outputs.push_back(o.trace);
  }
}

// ---------------------------------------------------------------------------

void add_globals(CLI::App& app, Options& o) {
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--threads", o.threads, "Worker threads (0 = runtime default)");
  app.add_option("--manifest", o.manifest, "Write a JSON run manifest here");
  app.add_option("--replay-manifest", o.replay, "Re-run a manifest and compare its outputs");
  app.add_flag("--desk-scale", o.desk, "Use the small-scale constants preset");
  app.add_option("--beta-coeff", o.beta_coeff, "Streaming beta coefficient (200)");
  app.add_option("--buffer-coeff", o.buffer_coeff, "Streaming buffer coefficient (20)");
  app.add_option("--alpha-coeff", o.alpha_coeff, "Parallel alpha coefficient (100)");
  app.add_option("--stop-coeff", o.stop_coeff, "Parallel stopping coefficient (100)");
  app.add_option("--estimate-ratio", o.estimate_ratio, "SpannerEstimate alpha multiplier (10)");
  app.add_option("--c0", o.c0, "Cluster diameter constant (4)");
  app.add_option("--ck", o.c_k, "Spanner peeling rounds constant (3)");
  app.add_option("--c-alpha", o.c_alpha, "Game alpha constant (8)");
  app.add_option("--t-override", o.t_override, "Number of spanner forest groups");
}

// Drops --manifest and --replay-manifest so a manifest records the command
// that produced the outputs.
std::vector<std::string> strip_manifest_flags(const std::vector<std::string>& args) {
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--manifest" || a == "--replay-manifest") {
      ++i;
      continue;
    }
    if (a.rfind("--manifest=", 0) == 0 || a.rfind("--replay-manifest=", 0) == 0) continue;
    kept.push_back(a);
  }
  return kept;
}

int code_for(const std::exception_ptr& e, std::ostream& err) {
  try {
    std::rethrow_exception(e);
  } catch (const InputError& x) {
    err << "error: " << x.what() << '\n';
    return kBadInput;
  } catch (const CapExceeded& x) {
    err << "error: " << x.what() << '\n';
    return kBadInput;
  } catch (const std::exception& x) {
    err << "error: " << x.what() << '\n';
    return kContractViolation;
  }
}

struct Execution {
  int code = kOk;
  std::string stdout_text;
  Record record;
  std::string command;
  double seconds = 0.0;
};

int execute(const std::vector<std::string>& args, Options& o, Execution& ex, std::ostream& err) {
  CLI::App app{"Spectral sparsification toolkit", "resparse"};
  app.fallthrough();
  add_globals(app, o);

  auto* gen = app.add_subcommand("gen", "Generate a graph");
  gen->add_option("family", o.family, "path|cycle|complete|grid|star|barbell|gnp")->required();
  gen->add_option("n", o.n, "Vertex count")->required();
  gen->add_option("--p", o.p, "Edge probability for gnp");
  gen->add_option("--out,-o", o.out, "Output edge list (default stdout)");

  auto* stream = app.add_subcommand("stream", "Single-pass streaming sparsifier");
  stream->add_option("input", o.in, "Input edge list")->required();
  stream->add_option("--epsilon,-e", o.epsilon, "Target error");
  stream->add_option("--delta-jl", o.delta_jl, "Sketch accuracy for sketched leverage");
  stream->add_option("--leverage", o.leverage, "auto|exact|sketched");
  stream->add_flag("--assert-space", o.assert_space, "Fail if the buffer exceeds its bound");
  stream->add_option("--out,-o", o.out, "Output edge list (default stdout)");

  auto* parallel = app.add_subcommand("parallel", "Spanner-based parallel sparsifier");
  parallel->add_option("input", o.in, "Input edge list")->required();
  parallel->add_option("--epsilon,-e", o.epsilon, "Target error");
  parallel->add_option("--max-rounds", o.max_rounds, "Round cap (default 2 log2 n)");
  parallel->add_option("--round-log", o.round_log, "Round log CSV");
  parallel->add_flag("--forests", o.forests, "Track spanners and report the forest decomposition");
  parallel->add_option("--out,-o", o.out, "Output edge list (default stdout)");

  auto* verify = app.add_subcommand("verify", "Measure how well H approximates G");
  verify->add_option("reference", o.g_path, "Reference edge list")->required();
  verify->add_option("candidate", o.h_path, "Candidate edge list")->required();

  auto* game = app.add_subcommand("game", "Monte Carlo runs of the resparsification game");
  game->add_option("--rows", o.rows_path, "Edge list whose rows are played");
  game->add_option("--family", o.game_family, "Generated family when --rows is absent");
  game->add_option("--n", o.game_n, "Vertex count for --family");
  game->add_option("--p", o.p, "Edge probability for gnp");
  game->add_option("--epsilon,-e", o.epsilon, "Target error");
  game->add_option("--strategy", o.strategy, "halving|random");
  game->add_option("--trials", o.trials, "Number of games");
  game->add_flag("--strict", o.strict, "Only allow p >= 1/2");
  game->add_option("--halvings", o.halvings,
                   "Split rows so each copy can be halved this many times (0 = no split)");
  game->add_option("--max-moves", o.max_moves, "Move cap per game");
  game->add_option("--check-every", o.check_every, "Win check period in moves (0 = at end)");
  game->add_option("--mode", o.mode, "coupled|fresh");
  game->add_option("--histogram", o.histogram, "CSV histogram of per-trial max eps*");
  game->add_option("--trace", o.trace, "Move trace CSV of the first trial");

  std::vector<std::string> argv_store{"resparse"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream help_out;
    const int code = app.exit(e, help_out, err);
    ex.stdout_text = help_out.str();
    return e.get_exit_code() == 0 ? kOk : (code == 0 ? kOk : kBadInput);
  }
  if (!o.replay.empty()) return -1;  // caller handles replays

  if (o.threads > 0) omp_set_num_threads(o.threads);
  std::ostringstream out;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (gen->parsed()) {
      ex.command = "gen";
      cmd_gen(o, ex.record, out);
    } else if (stream->parsed()) {
      ex.command = "stream";
      cmd_stream(o, ex.record, out);
    } else if (parallel->parsed()) {
      ex.command = "parallel";
      cmd_parallel(o, ex.record, out);
    } else if (verify->parsed()) {
      ex.command = "verify";
      cmd_verify(o, ex.record, out);
    } else if (game->parsed()) {
      ex.command = "game";
      cmd_game(o, ex.record, out);
    } else {
      err << app.help();
      return kBadInput;
    }
    ex.code = ex.record.exit_code;
  } catch (...) {
    ex.code = code_for(std::current_exception(), err);
  }
  ex.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ex.stdout_text = out.str();
  return ex.code;
}

json digests(const std::vector<std::string>& paths) {
  json list = json::array();
  for (const std::string& p : paths) list.push_back({{"path", p}, {"fnv1a", file_digest(p)}});
  return list;
}

int replay(const std::string& path, std::ostream& out, std::ostream& err) {
  json manifest;
  try {
    manifest = json::parse(read_file(path));
  } catch (const json::exception& e) {
    err << "error: manifest " << path << ": " << e.what() << '\n';
    return kBadInput;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  }
  if (!manifest.contains("argv") || !manifest["argv"].is_array()) {
    err << "error: manifest " << path << " has no argv\n";
    return kBadInput;
  }
  for (const json& in : manifest.value("inputs", json::array())) {
    const std::string p = in.at("path");
    if (file_digest(p) != in.at("fnv1a").get<std::string>()) {
      err << "error: input " << p << " changed since the manifest was written\n";
      return kBadInput;
    }
  }
  const auto args = manifest["argv"].get<std::vector<std::string>>();
  Options o;
  Execution ex;
  execute(args, o, ex, err);
  std::size_t mismatches = 0;
  std::size_t checked = 1;
  if (text_digest(ex.stdout_text) != manifest.value("stdout_fnv1a", std::string())) {
    out << "mismatch <stdout>\n";
    ++mismatches;
  }
  for (const json& f : manifest.value("outputs", json::array())) {
    const std::string p = f.at("path");
    ++checked;
    if (file_digest(p) != f.at("fnv1a").get<std::string>()) {
      out << "mismatch " << p << '\n';
      ++mismatches;
    }
  }
  if (ex.code != manifest.value("exit_code", 0)) {
    out << "mismatch exit code " << ex.code << '\n';
    ++mismatches;
  }
  if (mismatches > 0) {
    out << "replay: " << mismatches << " of " << checked << " outputs differ\n";
    return kContractViolation;
  }
  out << "replay: " << checked << " outputs identical\n";
  return kOk;
}

}  // namespace

std::string text_digest(const std::string& text) { return hex(fnv1a(text.data(), text.size())); }

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "missing";
  std::uint64_t h = 1469598103934665603ull;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h = fnv1a(buf, static_cast<std::size_t>(in.gcount()), h);
  }
  return hex(h);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  Execution ex;
  const int code = execute(args, o, ex, err);
  if (code == -1) return replay(o.replay, out, err);
  out << ex.stdout_text;
  if (!o.manifest.empty() && !ex.command.empty()) {
    json m;
    m["command"] = ex.command;
    m["argv"] = strip_manifest_flags(args);
    m["seed"] = o.seed;
    m["threads"] = o.threads;
    m["desk_scale"] = o.desk;
    m["config"] = ex.record.config;
    m["inputs"] = digests(ex.record.inputs);
    m["outputs"] = digests(ex.record.outputs);
    m["stdout_fnv1a"] = text_digest(ex.stdout_text);
    m["metrics"] = ex.record.metrics;
    m["exit_code"] = code;
    m["wall_time_seconds"] = ex.seconds;
    try {
      write_file(o.manifest, m.dump(2) + "\n");
    } catch (const InputError& e) {
      err << "error: " << e.what() << '\n';
      return kBadInput;
    }
  }
  return code;
}

}  // namespace resparse::cli
