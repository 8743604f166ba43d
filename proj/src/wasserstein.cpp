#include "cutofflab/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cutofflab/rng.hpp"

namespace cutofflab {

namespace {

constexpr std::uint64_t kWassersteinModuleId = 0x3a55ull;

void check_measure(const EmpiricalMeasure& mu) {
  if (mu.points.rows() < 1) throw DegenerateInput("empirical measure needs at least one point");
  if (!mu.points.allFinite()) throw DegenerateInput("empirical measure has non-finite points");
  if (mu.weights.size() != mu.points.rows()) {
    throw DegenerateInput("weight count does not match point count");
  }
  if (mu.weights.minCoeff() < 0.0) throw DegenerateInput("negative weight");
  if (std::abs(mu.weights.sum() - 1.0) > 1e-12) {
    throw DegenerateInput("weights must sum to 1 within 1e-12");
  }
}

double apply_outer(double total, double p) {
  return p >= 1.0 ? std::pow(total, 1.0 / p) : total;
}

std::vector<Eigen::Index> draw_indices(Eigen::Index n, Eigen::Index m, RngStream& rng,
                                       bool with_replacement) {
  std::vector<Eigen::Index> picked(static_cast<std::size_t>(m));
  if (with_replacement) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto idx = static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(n));
      picked[static_cast<std::size_t>(i)] = std::min(idx, n - 1);
    }
  } else {
    // partial Fisher-Yates over an index vector
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto pick =
          i + static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(n - i));
      std::swap(order[static_cast<std::size_t>(i)],
                order[static_cast<std::size_t>(std::min(pick, n - 1))]);
      picked[static_cast<std::size_t>(i)] = order[static_cast<std::size_t>(i)];
    }
  }
  return picked;
}

EmpiricalMeasure take_rows(const EmpiricalMeasure& mu, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(rows.size()), mu.points.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    pts.row(static_cast<Eigen::Index>(i)) = mu.points.row(rows[i]);
  }
  return EmpiricalMeasure(std::move(pts));
}

}  // namespace

EmpiricalMeasure::EmpiricalMeasure(Eigen::MatrixXd pts) : points(std::move(pts)) {
  weights = Eigen::VectorXd::Constant(points.rows(), 1.0 / static_cast<double>(points.rows()));
  check_measure(*this);
}

EmpiricalMeasure::EmpiricalMeasure(Eigen::MatrixXd pts, Eigen::VectorXd w)
    : points(std::move(pts)), weights(std::move(w)) {
  check_measure(*this);
}

bool EmpiricalMeasure::uniform_weights() const {
  const double expected = 1.0 / static_cast<double>(size());
  return ((weights.array() - expected).abs() < 1e-12).all();
}

WpResult wp_exact_1d(const EmpiricalMeasure& mu1, const EmpiricalMeasure& mu2, double p) {
  if (mu1.dim() != 1 || mu2.dim() != 1) {
    throw DimensionMismatch("wp_exact_1d requires one-dimensional supports");
  }
  struct Atom {
    double x, w;
  };
  auto atoms = [](const EmpiricalMeasure& mu) {
    std::vector<Atom> a(static_cast<std::size_t>(mu.size()));
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
      a[static_cast<std::size_t>(i)] = {mu.points(i, 0), mu.weights(i)};
    }
    std::sort(a.begin(), a.end(), [](const Atom& l, const Atom& r) { return l.x < r.x; });
    return a;
  };
  std::vector<Atom> a = atoms(mu1), b = atoms(mu2);

  // integrate |F1^{-1} - F2^{-1}|^p over the merged weight partition
  double total = 0.0;
  std::size_t i = 0, j = 0;
  double ra = a[0].w, rb = b[0].w;
  while (i < a.size() && j < b.size()) {
    const double step = std::min(ra, rb);
    total += step * std::pow(std::abs(a[i].x - b[j].x), p);
    ra -= step;
    rb -= step;
    if (ra <= 0.0 && i + 1 < a.size()) ra = a[++i].w;
    else if (ra <= 0.0) ++i;
    if (rb <= 0.0 && j + 1 < b.size()) rb = b[++j].w;
    else if (rb <= 0.0) ++j;
  }
  return {apply_outer(total, p), p, WpMethod::exact_1d, outer_exponent(p)};
}

double solve_assignment(const Eigen::MatrixXd& cost, std::vector<int>& row_to_col) {
  // Jonker-Volgenant shortest augmenting path for the dense square LAP.
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw DimensionMismatch("assignment cost matrix must be square");
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<int> rowsol(n, -1), colsol(n, -1);
  std::vector<double> v(n, 0.0);
  std::vector<int> free_rows(n, 0), collist(n, 0), pred(n, 0), matches(n, 0);
  std::vector<double> d(n, 0.0);

  // column reduction (reverse order gives better initial duals)
  for (int j = n - 1; j >= 0; --j) {
    double min_cost = cost(0, j);
    int imin = 0;
    for (int i = 1; i < n; ++i) {
      if (cost(i, j) < min_cost) {
        min_cost = cost(i, j);
        imin = i;
      }
    }
    v[j] = min_cost;
    if (++matches[imin] == 1) {
      rowsol[imin] = j;
      colsol[j] = imin;
    } else if (v[j] < v[rowsol[imin]]) {
      const int j1 = rowsol[imin];
      rowsol[imin] = j;
      colsol[j] = imin;
      colsol[j1] = -1;
    } else {
      colsol[j] = -1;
    }
  }

  // reduction transfer
  int numfree = 0;
  for (int i = 0; i < n; ++i) {
    if (matches[i] == 0) {
      free_rows[numfree++] = i;
    } else if (matches[i] == 1) {
      const int j1 = rowsol[i];
      double min_reduced = kInf;
      for (int j = 0; j < n; ++j) {
        if (j != j1) min_reduced = std::min(min_reduced, cost(i, j) - v[j]);
      }
      v[j1] -= min_reduced;
    }
  }

  // augmenting row reduction, two sweeps; the work budget stops the
  // reinsertion ping-pong that float ties can cause (the dual update may
  // underflow to a no-op), after which the augment phase finishes exactly
  for (int sweep = 0; sweep < 2; ++sweep) {
    int k = 0;
    const int prev_numfree = numfree;
    long long budget = 16LL * prev_numfree + 64;
    numfree = 0;
    while (k < prev_numfree) {
      const int i = free_rows[k++];
      double umin = cost(i, 0) - v[0];
      double usubmin = kInf;
      int j1 = 0, j2 = -1;
      for (int j = 1; j < n; ++j) {
        const double h = cost(i, j) - v[j];
        if (h < usubmin) {
          if (h >= umin) {
            usubmin = h;
            j2 = j;
          } else {
            usubmin = umin;
            umin = h;
            j2 = j1;
            j1 = j;
          }
        }
      }
      int i0 = colsol[j1];
      if (umin < usubmin) {
        v[j1] -= usubmin - umin;
      } else if (i0 >= 0) {
        j1 = j2;
        i0 = colsol[j2];
      }
      rowsol[i] = j1;
      colsol[j1] = i;
      if (i0 >= 0) {
        if (umin < usubmin && --budget >= 0) {
          free_rows[--k] = i0;
        } else {
          free_rows[numfree++] = i0;
        }
      }
    }
  }

  // augment remaining free rows with Dijkstra over reduced costs
  for (int f = 0; f < numfree; ++f) {
    const int freerow = free_rows[f];
    for (int j = 0; j < n; ++j) {
      d[j] = cost(freerow, j) - v[j];
      pred[j] = freerow;
      collist[j] = j;
    }
    int low = 0, up = 0, last = 0;
    int endofpath = -1;
    double min_d = 0.0;
    bool unassigned_found = false;
    do {
      if (up == low) {
        if (up >= n) throw Error("assignment: augmenting path search exhausted all columns");
        last = low - 1;
        min_d = d[collist[up++]];
        for (int k = up; k < n; ++k) {
          const int j = collist[k];
          const double h = d[j];
          if (h <= min_d) {
            if (h < min_d) {
              up = low;
              min_d = h;
            }
            collist[k] = collist[up];
            collist[up++] = j;
          }
        }
        for (int k = low; k < up; ++k) {
          if (colsol[collist[k]] < 0) {
            endofpath = collist[k];
            unassigned_found = true;
            break;
          }
        }
      }
      if (!unassigned_found) {
        const int j1 = collist[low++];
        const int i = colsol[j1];
        const double h = cost(i, j1) - v[j1] - min_d;
        for (int k = up; k < n; ++k) {
          const int j = collist[k];
          const double reduced = cost(i, j) - v[j] - h;
          if (reduced < d[j]) {
            pred[j] = i;
            if (reduced == min_d) {
              if (colsol[j] < 0) {
                endofpath = j;
                unassigned_found = true;
                break;
              }
              collist[k] = collist[up];
              collist[up++] = j;
            }
            d[j] = reduced;
          }
        }
      }
    } while (!unassigned_found);

    for (int k = 0; k <= last; ++k) {
      const int j1 = collist[k];
      v[j1] += d[j1] - min_d;
    }
    int i;
    do {
      i = pred[endofpath];
      colsol[endofpath] = i;
      const int j1 = endofpath;
      endofpath = rowsol[i];
      rowsol[i] = j1;
    } while (i != freerow);
  }

  double total = 0.0;
  for (int i = 0; i < n; ++i) total += cost(i, rowsol[i]);
  row_to_col = std::move(rowsol);
  return total;
}

WpResult wp_assignment(const EmpiricalMeasure& mu1, const EmpiricalMeasure& mu2, double p,
                       int size_cap) {
  if (mu1.dim() != mu2.dim()) throw DimensionMismatch("wp_assignment: dimension mismatch");
  if (mu1.size() != mu2.size()) {
    throw UnequalWeights("wp_assignment needs equal sample counts (use wp_estimate)");
  }
  if (!mu1.uniform_weights() || !mu2.uniform_weights()) {
    throw UnequalWeights("wp_assignment needs uniform weights");
  }
  const Eigen::Index n = mu1.size();
  if (n > size_cap) {
    throw SizeCapExceeded("wp_assignment: n = " + std::to_string(n) + " exceeds cap " +
                          std::to_string(size_cap));
  }
  Eigen::MatrixXd cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      cost(i, j) = std::pow((mu1.points.row(i) - mu2.points.row(j)).norm(), p);
    }
  }
  std::vector<int> perm;
  const double total = solve_assignment(cost, perm) / static_cast<double>(n);
  return {apply_outer(total, p), p, WpMethod::assignment, outer_exponent(p)};
}

WpResult wp_sliced(const EmpiricalMeasure& mu1, const EmpiricalMeasure& mu2, double p,
                   int n_directions, std::uint64_t seed) {
  if (p < 1.0) throw DegenerateInput("wp_sliced requires p >= 1");
  if (n_directions < 1) throw DegenerateInput("wp_sliced requires n_directions >= 1");
  if (mu1.dim() != mu2.dim()) throw DimensionMismatch("wp_sliced: dimension mismatch");
  const int d = mu1.dim();
  RngStream rng(derive_stream_key(seed, kWassersteinModuleId, 7), 0, 0);
  double acc = 0.0;
  for (int k = 0; k < n_directions; ++k) {
    Eigen::VectorXd dir(d);
    double norm = 0.0;
    do {
      for (int i = 0; i < d; ++i) dir[i] = rng.normal();
      norm = dir.norm();
    } while (norm == 0.0);
    dir /= norm;
    EmpiricalMeasure proj1(mu1.points * dir, mu1.weights);
    EmpiricalMeasure proj2(mu2.points * dir, mu2.weights);
    acc += std::pow(wp_exact_1d(proj1, proj2, p).value, p);
  }
  return {std::pow(acc / n_directions, 1.0 / p), p, WpMethod::sliced, outer_exponent(p)};
}

ShiftLinearityReport verify_shift_linearity(const EmpiricalMeasure& mu, const Eigen::VectorXd& u,
                                            double p) {
  const Eigen::Index n = mu.size();
  EmpiricalMeasure shifted(mu.points.rowwise() + u.transpose(), mu.weights);
  const double lhs = wp_assignment(shifted, mu, p).value;

  const Eigen::RowVectorXd mean = mu.points.colwise().mean();
  const double scale = std::sqrt((mu.points.rowwise() - mean).squaredNorm() /
                                 static_cast<double>(n));
  ShiftLinearityReport report;
  report.lhs = lhs;
  report.tolerance = 6.0 * scale / std::sqrt(static_cast<double>(n)) + 1e-9;
  if (p >= 1.0) {
    report.rhs = u.norm();
    report.lower = report.rhs;
    report.pass = std::abs(lhs - report.rhs) <= report.tolerance;
  } else {
    const double moment = empirical_moment_of(mu, p);
    report.rhs = std::pow(u.norm(), p);
    report.lower = std::max(report.rhs - 2.0 * moment, 0.0);
    report.pass = lhs >= report.lower - report.tolerance && lhs <= report.rhs + report.tolerance;
  }
  return report;
}

TranslationHomogeneityReport verify_translation_homogeneity(const EmpiricalMeasure& mu1,
                                                            const EmpiricalMeasure& mu2,
                                                            const Eigen::VectorXd& u1,
                                                            const Eigen::VectorXd& u2, double c,
                                                            double p) {
  TranslationHomogeneityReport report;
  EmpiricalMeasure a(mu1.points.rowwise() + u1.transpose(), mu1.weights);
  EmpiricalMeasure b(mu2.points.rowwise() + u2.transpose(), mu2.weights);
  report.translation_lhs = wp_assignment(a, b, p).value;
  EmpiricalMeasure a_shift(mu1.points.rowwise() + (u1 - u2).transpose(), mu1.weights);
  report.translation_rhs = wp_assignment(a_shift, mu2, p).value;

  EmpiricalMeasure ca(c * mu1.points, mu1.weights);
  EmpiricalMeasure cb(c * mu2.points, mu2.weights);
  report.homogeneity_lhs = wp_assignment(ca, cb, p).value;
  report.factor = p >= 1.0 ? std::abs(c) : std::pow(std::abs(c), p);
  report.homogeneity_rhs = report.factor * wp_assignment(mu1, mu2, p).value;

  const double tol = 1e-9 * (1.0 + report.translation_rhs + report.homogeneity_rhs);
  report.pass = std::abs(report.translation_lhs - report.translation_rhs) <= tol &&
                std::abs(report.homogeneity_lhs - report.homogeneity_rhs) <= tol;
  return report;
}

double empirical_moment_of(const EmpiricalMeasure& mu, double p) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    acc += mu.weights(i) * std::pow(mu.points.row(i).norm(), p);
  }
  return acc;
}

WpEstimate wp_estimate(const EmpiricalMeasure& mu1, const EmpiricalMeasure& mu2, double p,
                       const WpEstimateOptions& opts) {
  if (mu1.dim() != mu2.dim()) throw DimensionMismatch("wp_estimate: dimension mismatch");
  const bool one_d_exact = (mu1.dim() == 1 && p >= 1.0);
  const Eigen::Index cap = one_d_exact ? std::max<Eigen::Index>(opts.size_cap, 1 << 20)
                                       : static_cast<Eigen::Index>(opts.size_cap);
  const Eigen::Index m = std::min({mu1.size(), mu2.size(), cap});
  const bool subsampled = (mu1.size() > m) || (mu2.size() > m);

  auto evaluate = [&](const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    return one_d_exact ? wp_exact_1d(a, b, p).value
                       : wp_assignment(a, b, p, static_cast<int>(m)).value;
  };

  WpEstimate est;
  est.reps = opts.reps;
  const bool paired = mu1.size() == mu2.size();
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(opts.reps));
  if (subsampled) {
    for (int r = 0; r < opts.reps; ++r) {
      RngStream rng(derive_stream_key(opts.seed, kWassersteinModuleId, 100 + r), 0, 0);
      // equal-size clouds are subsampled with shared row indices so any
      // coupling between them survives; the estimator stays exchangeable
      EmpiricalMeasure s1 = mu1, s2 = mu2;
      if (paired) {
        const auto rows = draw_indices(mu1.size(), m, rng, false);
        s1 = take_rows(mu1, rows);
        s2 = take_rows(mu2, rows);
      } else {
        if (mu1.size() > m) s1 = take_rows(mu1, draw_indices(mu1.size(), m, rng, false));
        if (mu2.size() > m) s2 = take_rows(mu2, draw_indices(mu2.size(), m, rng, false));
      }
      values.push_back(evaluate(s1, s2));
    }
    est.value = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    double ss = 0.0;
    for (double x : values) ss += (x - est.value) * (x - est.value);
    est.stderr_ = std::sqrt(ss / std::max<std::size_t>(values.size() - 1, 1)) /
                  std::sqrt(static_cast<double>(values.size()));
  } else {
    est.value = evaluate(mu1, mu2);
    for (int r = 0; r < opts.reps; ++r) {
      RngStream rng(derive_stream_key(opts.seed, kWassersteinModuleId, 200 + r), 0, 0);
      const auto rows = draw_indices(mu1.size(), m, rng, true);
      const EmpiricalMeasure s1 = take_rows(mu1, rows);
      const EmpiricalMeasure s2 =
          paired ? take_rows(mu2, rows)
                 : take_rows(mu2, draw_indices(mu2.size(), m, rng, true));
      values.push_back(evaluate(s1, s2));
    }
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    double ss = 0.0;
    for (double x : values) ss += (x - mean) * (x - mean);
    // bootstrap spread approximates the sd of one full evaluation
    est.stderr_ = std::sqrt(ss / std::max<std::size_t>(values.size() - 1, 1));
  }
  est.stderr_ = std::max(est.stderr_, 1e-15 * (1.0 + est.value));
  return est;
}

}  // namespace cutofflab
