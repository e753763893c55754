#include "resparse/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <ostream>
#include <string>

#include <Eigen/Eigenvalues>

#include "resparse/edge_list.hpp"
#include "resparse/error.hpp"
#include "resparse/leverage.hpp"

namespace resparse {
namespace {

constexpr double kRelTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

double max_eigenvalue(const DenseMatrix& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()[eig.eigenvalues().size() - 1];
}

}  // namespace

double game_alpha(std::size_t n, double epsilon, double c_alpha) {
  if (n < 2) throw InputError("game_alpha: dimension must be at least 2");
  if (!(c_alpha > 0.0)) throw InputError("game_alpha: c_alpha must be positive");
  return c_alpha * std::log(static_cast<double>(n)) / (epsilon * epsilon);
}

Game::Game(std::vector<Row> rows, const GameConfig& config, Seed seed)
    : rows_(std::move(rows)), config_(config), n_(0), alpha_(0.0), rng_(seed) {
  if (!(config_.epsilon > 0.0 && config_.epsilon <= 0.5)) {
    throw InputError("game: epsilon must lie in (0, 1/2]");
  }
  if (rows_.empty()) throw InputError("game: needs at least one row");
  if (config_.check == WinCheck::every_k && config_.check_every == 0) {
    throw InputError("game: check_every must be positive");
  }
  n_ = rows_.front().dimension();
  for (const Row& r : rows_) {
    if (r.dimension() != n_) throw InputError("game: row dimension mismatch");
  }
  if (n_ > dense_cap()) {
    throw CapExceeded("game: dimension " + std::to_string(n_) + " exceeds dense cap");
  }
  alpha_ = config_.alpha ? *config_.alpha : game_alpha(n_, config_.epsilon, config_.c_alpha);
  if (!(alpha_ > 0.0)) throw InputError("game: alpha must be positive");

  const std::size_t m = rows_.size();
  reference_ = gram(n_, rows_);
  const DenseMatrix whitening = RangeFactor::of(reference_).whitening();
  whitened_rows_ = DenseMatrix::Zero(whitening.cols(), static_cast<Eigen::Index>(m));
  leverage_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto col = whitened_rows_.col(static_cast<Eigen::Index>(i));
    for (const RowEntry& e : rows_[i].entries()) {
      col.noalias() += e.value * whitening.row(static_cast<Eigen::Index>(e.index)).transpose();
    }
    leverage_[i] = col.squaredNorm();
  }

  playable_.assign(m, true);
  std::vector<std::size_t> offending;
  for (std::size_t i = 0; i < m; ++i) {
    if (leverage_[i] * alpha_ > 1.0 + kRelTol) {
      offending.push_back(i);
      playable_[i] = false;
    }
  }
  if (!offending.empty() && config_.high_leverage == HighLeveragePolicy::reject) {
    std::string list;
    for (std::size_t k = 0; k < offending.size() && k < 20; ++k) {
      if (k > 0) list += ", ";
      list += std::to_string(offending[k]);
    }
    if (offending.size() > 20) list += ", ...";
    throw InputError("game: " + std::to_string(offending.size()) +
                     " row(s) have leverage above 1/alpha: " + list);
  }

  weights_.assign(m, 1.0);
  if (config_.mode == RandomnessMode::coupled) {
    coupling_.resize(m);
    for (double& x : coupling_) x = rng_.exponential();
  }
  current_ = reference_;
  whitened_current_ = whitened_rows_ * whitened_rows_.transpose();
  trace_.variation = DenseMatrix::Zero(whitened_rows_.rows(), whitened_rows_.rows());
}

double Game::weight_cap(std::size_t i) const {
  double cap = leverage_[i] > 0.0 ? 1.0 / (alpha_ * leverage_[i]) : kInf;
  if (config_.mode == RandomnessMode::coupled) cap = std::min(cap, std::exp(coupling_[i]));
  return cap;
}

double Game::min_legal_p(std::size_t i) const {
  if (i >= rows_.size() || !playable_[i] || weights_[i] == 0.0) return kInf;
  double p = alpha_ * weights_[i] * leverage_[i];
  if (config_.strict) p = std::max(p, 0.5);
  if (p > 1.0 + kRelTol) return kInf;
  return std::min(p, 1.0);
}

bool Game::legal_move(std::size_t i, double p) const {
  if (i >= rows_.size() || !playable_[i]) return false;
  if (weights_[i] == 0.0) return false;
  if (!(p > 0.0 && p <= 1.0)) return false;
  if (config_.strict && p < 0.5) return false;
  return alpha_ * weights_[i] * leverage_[i] <= p * (1.0 + kRelTol);
}

bool Game::play_move(std::size_t i, double p) {
  if (!legal_move(i, p)) {
    throw ContractViolation("game: illegal move (row " + std::to_string(i) +
                            ", p = " + format_weight(p) + ")");
  }
  bool kept = false;
  if (config_.mode == RandomnessMode::coupled) {
    kept = std::log(weights_[i] / p) <= coupling_[i];
  } else {
    kept = rng_.uniform() < p;
  }
  return apply(i, p, kept);
}

bool Game::play_move_with_outcome(std::size_t i, double p, bool kept) {
  if (!legal_move(i, p)) {
    throw ContractViolation("game: illegal move (row " + std::to_string(i) +
                            ", p = " + format_weight(p) + ")");
  }
  return apply(i, p, kept);
}

bool Game::apply(std::size_t i, double p, bool kept) {
  const double w = weights_[i];
  const double lev = leverage_[i];
  MoveRecord rec;
  rec.move = trace_.moves.size() + 1;
  rec.row = i;
  rec.p = p;
  rec.kept = kept;
  rec.weight_before = w;
  rec.norm_x = kept ? (1.0 - p) / p * w * lev : w * lev;
  if (rec.norm_x > (1.0 + 1e-9) / alpha_) {
    throw ContractViolation("game: |X_j| exceeds 1/alpha");
  }

  const auto col = whitened_rows_.col(static_cast<Eigen::Index>(i));
  trace_.variation.noalias() += ((1.0 - p) / p) * w * w * lev * (col * col.transpose());

  const double next = kept ? w / p : 0.0;
  const double delta = next - w;
  rows_[i].add_outer_product(current_, delta);
  whitened_current_.noalias() += delta * (col * col.transpose());
  weights_[i] = next;

  if (config_.mode == RandomnessMode::coupled && next > weight_cap(i) * (1.0 + kRelTol)) {
    throw ContractViolation("game: weight exceeded its cap min(e^x, 1/(alpha tau))");
  }
  if (config_.verify_cache) {
    const double scale = std::max(1.0, reference_.cwiseAbs().maxCoeff());
    if (current_consistency_error() > 1e-10 * scale) {
      throw ContractViolation("game: cached weighted sum drifted from recomputation");
    }
  }
  trace_.moves.push_back(rec);
  if (check_due()) check_win();
  return kept;
}

bool Game::check_due() const {
  switch (config_.check) {
    case WinCheck::every_move: return true;
    case WinCheck::every_k: return trace_.moves.size() % config_.check_every == 0;
    case WinCheck::at_end: return false;
  }
  return false;
}

Verdict Game::check_win() {
  double eps = 0.0;
  if (whitened_current_.rows() > 0) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(whitened_current_, Eigen::EigenvaluesOnly);
    const Vector& lambda = eig.eigenvalues();
    eps = std::max(std::abs(lambda[0] - 1.0), std::abs(lambda[lambda.size() - 1] - 1.0));
  }
  last_epsilon_ = eps;
  if (eps > config_.epsilon) won_ = true;
  if (!trace_.moves.empty()) {
    trace_.moves.back().epsilon_star = eps;
    trace_.moves.back().norm_w = quadratic_variation_norm();
  }
  return won_ ? Verdict::adversary_won : Verdict::not_yet;
}

double Game::quadratic_variation_norm() const {
  return std::max(0.0, max_eigenvalue(trace_.variation));
}

double Game::current_consistency_error() const {
  return (gram(n_, rows_, weights_) - current_).cwiseAbs().maxCoeff();
}

void Game::reseed(Seed seed) {
  rng_ = Rng(seed);
  if (config_.mode != RandomnessMode::coupled) return;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (weights_[i] > 0.0) coupling_[i] = std::log(weights_[i]) + rng_.exponential();
  }
}

// ---------------------------------------------------------------------------

AdversaryStrategy halving_schedule() {
  auto cursor = std::make_shared<std::size_t>(0);
  return [cursor](const Game& g) -> std::optional<Move> {
    const std::size_t m = g.num_rows();
    for (std::size_t scanned = 0; scanned < m; ++scanned) {
      const std::size_t i = (*cursor + scanned) % m;
      if (g.legal_move(i, 0.5)) {
        *cursor = (i + 1) % m;
        return Move{i, 0.5};
      }
    }
    return std::nullopt;
  };
}

AdversaryStrategy uniform_random_legal(Seed seed) {
  auto rng = std::make_shared<Rng>(seed);
  return [rng](const Game& g) -> std::optional<Move> {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < g.num_rows(); ++i) {
      if (g.leverage(i) > 0.0 && g.min_legal_p(i) < 1.0) candidates.push_back(i);
    }
    if (candidates.empty()) return std::nullopt;
    const std::size_t i = candidates[rng->below(candidates.size())];
    const double lo = g.min_legal_p(i);
    return Move{i, lo + (1.0 - lo) * rng->uniform()};
  };
}

GameResult run_strategy(Game& game, const AdversaryStrategy& strategy,
                        std::size_t max_moves) {
  GameResult result;
  const std::size_t first_record = game.trace().moves.size();
  while (!game.adversary_has_won()) {
    if (result.moves >= max_moves) {
      result.hit_move_cap = true;
      break;
    }
    const std::optional<Move> move = strategy(game);
    if (!move) break;
    if (!game.legal_move(move->row, move->p)) {
      throw ContractViolation("strategy emitted an illegal move (row " +
                              std::to_string(move->row) + ", p = " +
                              format_weight(move->p) + ")");
    }
    game.play_move(move->row, move->p);
    ++result.moves;
  }
  game.check_win();
  const auto& records = game.trace().moves;
  result.max_epsilon = game.last_epsilon();
  for (std::size_t k = first_record; k < records.size(); ++k) {
    if (records[k].epsilon_star) result.max_epsilon = std::max(result.max_epsilon, *records[k].epsilon_star);
  }
  result.verdict = game.adversary_has_won() ? Verdict::adversary_won : Verdict::not_yet;
  result.final_norm_w = game.quadratic_variation_norm();
  return result;
}

std::vector<Row> split_rows(std::span<const Row> rows,
                            std::span<const std::size_t> copies) {
  if (rows.size() != copies.size()) throw InputError("split_rows: size mismatch");
  std::vector<Row> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t c = copies[i];
    if (c == 0) throw InputError("split_rows: copy count must be positive");
    const double scale = 1.0 / std::sqrt(static_cast<double>(c));
    for (std::size_t k = 0; k < c; ++k) {
      if (const auto& e = rows[i].edge()) {
        out.push_back(Row::from_edge(rows[i].dimension(),
                                     Edge{e->u, e->v, e->w / static_cast<double>(c)}));
      } else {
        std::vector<RowEntry> entries(rows[i].entries().begin(), rows[i].entries().end());
        for (RowEntry& entry : entries) entry.value *= scale;
        out.emplace_back(rows[i].dimension(), std::move(entries));
      }
    }
  }
  return out;
}

std::vector<Row> split_for_game(std::size_t n, std::span<const Row> rows,
                                double alpha, unsigned halvings) {
  const LeverageEstimates tau = exact_leverage(n, rows);
  const double headroom = alpha * std::ldexp(1.0, static_cast<int>(halvings));
  std::vector<std::size_t> copies(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    copies[i] = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(tau[i] * headroom)));
  }
  return split_rows(rows, copies);
}

void write_trace_csv(std::ostream& out, const GameTrace& trace) {
  out << "move,i,p,kept,norm_X,norm_W,epsilon_star\n";
  for (const MoveRecord& r : trace.moves) {
    out << r.move << ',' << r.row << ',' << format_weight(r.p) << ','
        << (r.kept ? 1 : 0) << ',' << format_weight(r.norm_x) << ',';
    if (r.norm_w) out << format_weight(*r.norm_w);
    out << ',';
    if (r.epsilon_star) out << format_weight(*r.epsilon_star);
    out << '\n';
  }
}

}  // namespace resparse
