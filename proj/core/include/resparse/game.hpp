#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "resparse/linalg.hpp"
#include "resparse/random.hpp"
#include "resparse/rows.hpp"

namespace resparse {

// The resparsification game: rows a_1..a_m with M = sum a_i a_i^T, weights
// w_i starting at 1. A move (i, p) is legal when w_i != 0 and
// (w_i / p) a_i^T M^+ a_i <= 1/alpha; it keeps the row with probability p
// (w_i <- w_i / p) and zeroes it otherwise. The adversary wins once
// sum w_i a_i a_i^T leaves the (1 +- eps) band around M.

enum class RandomnessMode {
  // One x_i ~ Exp(1) per row, drawn up front; a move keeps row i iff
  // w_i / p <= e^{x_i}. By memorylessness this keeps with probability p.
  coupled,
  // A fresh uniform draw per move.
  fresh,
};

enum class HighLeveragePolicy { reject, exclude };

enum class WinCheck { every_move, every_k, at_end };

enum class Verdict { not_yet, adversary_won };

struct GameConfig {
  double epsilon = 0.25;
  double c_alpha = 8.0;
  // Overrides c_alpha * ln(n) / eps^2 when set.
  std::optional<double> alpha;
  RandomnessMode mode = RandomnessMode::coupled;
  // Only allow p >= 1/2.
  bool strict = false;
  HighLeveragePolicy high_leverage = HighLeveragePolicy::reject;
  WinCheck check = WinCheck::every_move;
  std::size_t check_every = 1;
  // Recompute sum w_i a_i a_i^T after every move and compare to the cache.
  bool verify_cache = false;
};

double game_alpha(std::size_t n, double epsilon, double c_alpha);

struct Move {
  std::size_t row = 0;
  double p = 1.0;
};

struct MoveRecord {
  std::size_t move = 0;  // 1-based
  std::size_t row = 0;
  double p = 1.0;
  bool kept = true;
  double weight_before = 0.0;
  // |X_j| measured in coordinates where M = I.
  double norm_x = 0.0;
  // Filled in on moves where the win condition was evaluated.
  std::optional<double> norm_w;
  std::optional<double> epsilon_star;
};

struct GameTrace {
  std::vector<MoveRecord> moves;
  // Predictable quadratic variation W_k = sum_j E_{j-1}[X_j^2], whitened.
  DenseMatrix variation;
};

class Game {
 public:
  // Throws InputError for eps outside (0, 1/2] or, under the reject policy,
  // rows whose leverage exceeds 1/alpha (the message lists them).
  Game(std::vector<Row> rows, const GameConfig& config, Seed seed);

  std::size_t num_rows() const { return rows_.size(); }
  std::size_t dimension() const { return n_; }
  double alpha() const { return alpha_; }
  double epsilon() const { return config_.epsilon; }
  const GameConfig& config() const { return config_; }

  const Row& row(std::size_t i) const { return rows_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }
  // a_i^T M^+ a_i, fixed for the whole game.
  double leverage(std::size_t i) const { return leverage_[i]; }
  bool playable(std::size_t i) const { return playable_[i]; }
  // min(e^{x_i}, 1 / (alpha a_i^T M^+ a_i)); the exponential term only
  // applies in coupled mode.
  double weight_cap(std::size_t i) const;
  // Smallest legal p for row i, or +inf if the row cannot be moved.
  double min_legal_p(std::size_t i) const;

  const DenseMatrix& reference() const { return reference_; }
  const DenseMatrix& current() const { return current_; }
  std::size_t move_count() const { return trace_.moves.size(); }
  bool adversary_has_won() const { return won_; }

  bool legal_move(std::size_t i, double p) const;
  // Plays (i, p). Returns whether the row was kept. Throws
  // ContractViolation for an illegal move and leaves the state unchanged.
  bool play_move(std::size_t i, double p);
  // Applies a move whose outcome was decided elsewhere (replaying an
  // algorithm's run as a game). Legality is still enforced.
  bool play_move_with_outcome(std::size_t i, double p, bool kept);

  // Evaluates the win condition now. Once won, stays won.
  Verdict check_win();
  double last_epsilon() const { return last_epsilon_; }
  double quadratic_variation_norm() const;
  const GameTrace& trace() const { return trace_; }

  // max |cached current - recomputed current|
  double current_consistency_error() const;

  // Replace the randomness for future moves. In coupled mode every live
  // x_i is redrawn from its law given the history, ln(w_i) + Exp(1).
  void reseed(Seed seed);
  // Test hook: force the coupled draw of row i.
  void set_coupling_draw(std::size_t i, double x) { coupling_[i] = x; }

 private:
  bool apply(std::size_t i, double p, bool kept);
  bool check_due() const;

  std::vector<Row> rows_;
  GameConfig config_;
  std::size_t n_;
  double alpha_;
  Rng rng_;
  std::vector<double> weights_;
  std::vector<double> leverage_;
  std::vector<bool> playable_;
  std::vector<double> coupling_;
  DenseMatrix reference_;
  DenseMatrix current_;
  DenseMatrix whitened_rows_;     // r x m, column i is W^T a_i
  DenseMatrix whitened_current_;  // r x r, W^T current W
  GameTrace trace_;
  double last_epsilon_ = 0.0;
  bool won_ = false;
};

using AdversaryStrategy = std::function<std::optional<Move>(const Game&)>;

// Sweeps rows in index order halving each live row (p = 1/2) while that is
// legal; stops after a full sweep finds nothing to halve.
AdversaryStrategy halving_schedule();
// Picks a uniformly random row among those admitting a nontrivial legal
// move and a uniform p in [min legal p, 1). Stops when no row qualifies.
AdversaryStrategy uniform_random_legal(Seed seed);

struct GameResult {
  Verdict verdict = Verdict::not_yet;
  std::size_t moves = 0;
  bool hit_move_cap = false;
  double max_epsilon = 0.0;
  double final_norm_w = 0.0;
};

// Plays until the strategy yields nothing, the adversary wins, or max_moves
// moves were made. The win condition is always evaluated once at the end.
// Throws ContractViolation if the strategy emits an illegal move.
GameResult run_strategy(Game& game, const AdversaryStrategy& strategy,
                        std::size_t max_moves);

// Splits each row into copies[i] equal rows a_i / sqrt(copies[i]); M is
// unchanged and each copy has 1/copies[i] of the leverage.
std::vector<Row> split_rows(std::span<const Row> rows,
                            std::span<const std::size_t> copies);
// Splits rows so that each copy can be halved `halvings` times before the
// leverage rule binds: copies = max(1, ceil(leverage * alpha * 2^halvings)).
std::vector<Row> split_for_game(std::size_t n, std::span<const Row> rows,
                                double alpha, unsigned halvings);

void write_trace_csv(std::ostream& out, const GameTrace& trace);

}  // namespace resparse
