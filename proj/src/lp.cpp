#include "cfa/lp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cfa {

namespace {

constexpr double kPriceTol = 1e-9;      // entering reduced-cost threshold
constexpr double kPivotTol = 1e-10;     // smallest usable ratio-test pivot
constexpr double kPhase1Tol = 1e-8;     // residual artificial mass => infeasible
constexpr double kCrashPivotMin = 0.25; // crash accepts only solid pivots
constexpr double kCertTol = 1e-8;       // reduced-cost certificate
constexpr double kResidTrigger = 1e-10; // refactorize when exceeded
constexpr long kMaxPivots = 200000;

constexpr double kInf = std::numeric_limits<double>::infinity();

enum RowKind { kLe, kGe, kEq };  // after sign normalization rhs >= 0

struct RowMeta {
    int user_row = -1;   // index into lp.rows, or -1 for an upper-bound row
    int ub_var = -1;     // bounded variable when user_row < 0
    bool negated = false;
    RowKind kind = kLe;
    int slack_col = -1;  // column of this row's slack/surplus, -1 for Eq
};

class Simplex {
public:
    explicit Simplex(const LinearProgram& lp) : lp_(lp) {}

    LpSolution run() {
        build();
        crash();
        add_artificials();
        init_objective_rows();
        if (nart_ > 0) {
            const Outcome p1 = iterate(/*phase1=*/true);
            if (p1 == Outcome::unbounded) {
                throw std::runtime_error("phase-1 objective unbounded (solver defect)");
            }
            if (-obj1()[rhs_col_] > kPhase1Tol) return {LpStatus::infeasible, {}, 0.0};
            drive_out_artificials();
            compact();
        }
        const Outcome p2 = iterate(/*phase1=*/false);
        if (p2 == Outcome::unbounded) return {LpStatus::unbounded, {}, 0.0};
        return extract();
    }

private:
    enum class Outcome { optimal, unbounded };

    const LinearProgram& lp_;
    int n_ = 0;        // structural columns
    int nslack_ = 0;
    int nart_ = 0;
    int art_base_ = 0;
    int cols_ = 0;     // active columns (structural + slack [+ artificial])
    int rhs_col_ = 0;
    int width_ = 0;
    int m_ = 0;
    std::vector<double> tab_;   // (m_ + 2) x width_: rows, then objective
                                // reduced costs, then phase-1 reduced costs
    std::vector<int> basis_;
    std::vector<RowMeta> meta_;
    long pivots_ = 0;

    double* row(int i) { return tab_.data() + static_cast<std::size_t>(i) * width_; }
    double* obj2() { return row(m_); }
    double* obj1() { return row(m_ + 1); }

    void build() {
        n_ = static_cast<int>(lp_.num_vars);
        meta_.clear();
        for (int k = 0; k < static_cast<int>(lp_.rows.size()); ++k) {
            RowMeta rm;
            rm.user_row = k;
            const LpRow& r = lp_.rows[k];
            rm.negated = r.rhs < 0.0;
            if (r.relation == Relation::equal) rm.kind = kEq;
            else rm.kind = rm.negated ? kGe : kLe;
            meta_.push_back(rm);
        }
        if (!lp_.upper_bound.empty()) {
            for (int j = 0; j < n_; ++j) {
                const double ub = lp_.upper_bound[static_cast<std::size_t>(j)];
                if (ub == kInf) continue;
                RowMeta rm;
                rm.ub_var = j;
                rm.negated = ub < 0.0;
                rm.kind = rm.negated ? kGe : kLe;
                meta_.push_back(rm);
            }
        }
        m_ = static_cast<int>(meta_.size());

        nslack_ = 0;
        for (auto& rm : meta_)
            if (rm.kind != kEq) rm.slack_col = n_ + nslack_++;
        int art_cap = 0;
        for (const auto& rm : meta_)
            if (rm.kind != kLe) ++art_cap;
        art_base_ = n_ + nslack_;
        cols_ = art_base_;          // artificials activated on demand
        rhs_col_ = art_base_ + art_cap;
        width_ = rhs_col_ + 1;

        tab_.assign(static_cast<std::size_t>(m_ + 2) * width_, 0.0);
        basis_.assign(static_cast<std::size_t>(m_), -1);
        for (int i = 0; i < m_; ++i) {
            const RowMeta& rm = meta_[static_cast<std::size_t>(i)];
            double* t = row(i);
            const double sign = rm.negated ? -1.0 : 1.0;
            if (rm.user_row >= 0) {
                const LpRow& r = lp_.rows[static_cast<std::size_t>(rm.user_row)];
                for (int j = 0; j < n_; ++j) t[j] = sign * r.coeffs[static_cast<std::size_t>(j)];
                t[rhs_col_] = sign * r.rhs;
            } else {
                t[rm.ub_var] = sign;
                t[rhs_col_] = sign * lp_.upper_bound[static_cast<std::size_t>(rm.ub_var)];
            }
            if (rm.slack_col >= 0) {
                t[rm.slack_col] = rm.kind == kLe ? 1.0 : -1.0;
                if (rm.kind == kLe) basis_[static_cast<std::size_t>(i)] = rm.slack_col;
            }
        }
    }

    // Deterministic triangular crash: give equality rows a structural basis
    // when a column with a single solid equality entry exists (scanning
    // columns high to low unwinds chained balance rows). Accepted only if
    // every right-hand side stays nonnegative; otherwise fall back to
    // artificials for all equality rows.
    void crash() {
        int n_eq = 0;
        for (const auto& rm : meta_)
            if (rm.kind == kEq) ++n_eq;
        if (n_eq == 0) return;

        const std::vector<double> snapshot = tab_;
        const std::vector<int> basis_snapshot = basis_;

        std::vector<char> col_used(static_cast<std::size_t>(n_), 0);
        bool progress = true;
        while (progress) {
            progress = false;
            for (int j = n_ - 1; j >= 0; --j) {
                if (col_used[static_cast<std::size_t>(j)]) continue;
                int hit = -1;
                bool multiple = false;
                for (int i = 0; i < m_ && !multiple; ++i) {
                    if (meta_[static_cast<std::size_t>(i)].kind != kEq ||
                        basis_[static_cast<std::size_t>(i)] >= 0)
                        continue;
                    if (std::fabs(row(i)[j]) > 1e-9) {
                        if (hit >= 0) multiple = true;
                        else hit = i;
                    }
                }
                if (multiple || hit < 0) continue;
                if (std::fabs(row(hit)[j]) < kCrashPivotMin) continue;
                pivot(hit, j, /*update_objectives=*/false);
                col_used[static_cast<std::size_t>(j)] = 1;
                progress = true;
            }
        }
        bool ok = true;
        for (int i = 0; i < m_; ++i) {
            double& b = row(i)[rhs_col_];
            if (b < 0.0) {
                if (b > -1e-9) b = 0.0;
                else { ok = false; break; }
            }
        }
        if (!ok) {
            tab_ = snapshot;
            basis_ = basis_snapshot;
        }
    }

    void add_artificials() {
        nart_ = 0;
        for (int i = 0; i < m_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] >= 0) continue;
            const int col = art_base_ + nart_++;
            row(i)[col] = 1.0;
            basis_[static_cast<std::size_t>(i)] = col;
        }
        if (nart_ > 0) cols_ = art_base_ + nart_;
    }

    void init_objective_rows() {
        double* o2 = obj2();
        std::fill(o2, o2 + width_, 0.0);
        for (int j = 0; j < n_; ++j) o2[j] = lp_.objective[static_cast<std::size_t>(j)];
        for (int i = 0; i < m_; ++i) {
            const double cb = basis_[static_cast<std::size_t>(i)] < n_
                                  ? lp_.objective[static_cast<std::size_t>(
                                        basis_[static_cast<std::size_t>(i)])]
                                  : 0.0;
            if (cb != 0.0) axpy(o2, row(i), -cb);
        }
        double* o1 = obj1();
        std::fill(o1, o1 + width_, 0.0);
        if (nart_ > 0) {
            // cost 1 on each artificial; all artificials start basic
            for (int i = 0; i < m_; ++i) {
                if (basis_[static_cast<std::size_t>(i)] >= art_base_) axpy(o1, row(i), -1.0);
            }
            for (int j = art_base_; j < cols_; ++j) o1[j] = 0.0;
        }
    }

    void axpy(double* __restrict dst, const double* __restrict src, double f) {
        for (int k = 0; k < width_; ++k) dst[k] += f * src[k];
    }

    void pivot(int r, int jc, bool update_objectives = true) {
        double* pr = row(r);
        const double inv = 1.0 / pr[jc];
        if (inv != 1.0) {
            for (int k = 0; k < width_; ++k) pr[k] *= inv;
        }
        pr[jc] = 1.0;
        const int last = update_objectives ? m_ + 2 : m_;
        for (int i = 0; i < last; ++i) {
            if (i == r) continue;
            double* ri = row(i);
            const double f = ri[jc];
            if (std::fabs(f) > 1e-13) {
                axpy(ri, pr, -f);
            }
            ri[jc] = 0.0;
        }
        basis_[static_cast<std::size_t>(r)] = jc;
        // clamp right-hand-side dust so ratio tests stay clean
        for (int i = 0; i < m_; ++i) {
            double& b = row(i)[rhs_col_];
            if (b < 0.0 && b > -1e-11) b = 0.0;
        }
    }

    Outcome iterate(bool phase1) {
        double* objective = phase1 ? obj1() : obj2();
        const int jmax = art_base_;  // artificials never re-enter
        for (;;) {
            if (++pivots_ > kMaxPivots) {
                throw std::runtime_error("simplex pivot limit exceeded");
            }
            // Bland: lowest-index column with a negative reduced cost
            int enter = -1;
            for (int j = 0; j < jmax; ++j) {
                if (objective[j] < -kPriceTol) { enter = j; break; }
            }
            if (enter < 0) return Outcome::optimal;

            int leave = -1;
            double best = kInf;
            for (int i = 0; i < m_; ++i) {
                const double a = row(i)[enter];
                if (a <= kPivotTol) continue;
                const double ratio = row(i)[rhs_col_] / a;
                const double window = 1e-9 + 1e-9 * std::fabs(best);
                if (leave < 0 || ratio < best - window) {
                    best = ratio;
                    leave = i;
                } else if (ratio <= best + window &&
                           basis_[static_cast<std::size_t>(i)] <
                               basis_[static_cast<std::size_t>(leave)]) {
                    leave = i;  // Bland tie-break: lowest leaving index
                }
            }
            if (leave < 0) return Outcome::unbounded;
            pivot(leave, enter);
        }
    }

    void drive_out_artificials() {
        for (int i = 0; i < m_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] < art_base_) continue;
            int target = -1;
            for (int j = 0; j < art_base_; ++j) {
                if (std::fabs(row(i)[j]) > 1e-7) { target = j; break; }
            }
            if (target >= 0) pivot(i, target);
            // else: the row is redundant and is dropped by compact()
        }
    }

    void compact() {
        const int new_cols = art_base_;
        const int new_width = new_cols + 1;
        std::vector<double> nt;
        std::vector<int> nb;
        std::vector<RowMeta> nm;
        nt.reserve(static_cast<std::size_t>(m_ + 2) * new_width);
        for (int i = 0; i < m_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] >= art_base_) continue;
            const double* t = row(i);
            nt.insert(nt.end(), t, t + new_cols);
            nt.push_back(t[rhs_col_]);
            nb.push_back(basis_[static_cast<std::size_t>(i)]);
            nm.push_back(meta_[static_cast<std::size_t>(i)]);
        }
        const double* o2 = obj2();
        nt.insert(nt.end(), o2, o2 + new_cols);
        nt.push_back(o2[rhs_col_]);
        nt.insert(nt.end(), static_cast<std::size_t>(new_width), 0.0);

        m_ = static_cast<int>(nb.size());
        tab_ = std::move(nt);
        basis_ = std::move(nb);
        meta_ = std::move(nm);
        nart_ = 0;
        cols_ = new_cols;
        rhs_col_ = new_cols;
        width_ = new_width;
    }

    double internal_coeff(const RowMeta& rm, int j) const {
        const double sign = rm.negated ? -1.0 : 1.0;
        if (j < n_) {
            if (rm.user_row >= 0) {
                return sign *
                       lp_.rows[static_cast<std::size_t>(rm.user_row)]
                           .coeffs[static_cast<std::size_t>(j)];
            }
            return j == rm.ub_var ? sign : 0.0;
        }
        if (j == rm.slack_col) return rm.kind == kLe ? 1.0 : -1.0;
        return 0.0;
    }

    double internal_rhs(const RowMeta& rm) const {
        const double sign = rm.negated ? -1.0 : 1.0;
        if (rm.user_row >= 0) return sign * lp_.rows[static_cast<std::size_t>(rm.user_row)].rhs;
        return sign * lp_.upper_bound[static_cast<std::size_t>(rm.ub_var)];
    }

    // Residual of x against every original row (and bound), absolute.
    double residual(const std::vector<double>& x) const {
        double worst = 0.0;
        for (const auto& r : lp_.rows) {
            long double lhs = 0.0;
            for (int j = 0; j < n_; ++j)
                lhs += static_cast<long double>(r.coeffs[static_cast<std::size_t>(j)]) * x[static_cast<std::size_t>(j)];
            const double gap = static_cast<double>(lhs) - r.rhs;
            worst = std::max(worst, r.relation == Relation::equal ? std::fabs(gap) : gap);
        }
        for (int j = 0; j < n_; ++j) {
            worst = std::max(worst, -x[static_cast<std::size_t>(j)]);
            if (!lp_.upper_bound.empty() && lp_.upper_bound[static_cast<std::size_t>(j)] != kInf) {
                worst = std::max(worst, x[static_cast<std::size_t>(j)] -
                                            lp_.upper_bound[static_cast<std::size_t>(j)]);
            }
        }
        return worst;
    }

    // Fresh solve of B x_B = b from original data with one refinement pass;
    // removes drift the pivoted tableau may have accumulated.
    bool refactor(std::vector<double>& x) const {
        const int mm = m_;
        std::vector<double> B(static_cast<std::size_t>(mm) * mm);
        for (int i = 0; i < mm; ++i)
            for (int k = 0; k < mm; ++k)
                B[static_cast<std::size_t>(i) * mm + k] =
                    internal_coeff(meta_[static_cast<std::size_t>(i)], basis_[static_cast<std::size_t>(k)]);
        std::vector<double> lu = B;
        std::vector<int> perm(static_cast<std::size_t>(mm));
        for (int i = 0; i < mm; ++i) perm[static_cast<std::size_t>(i)] = i;
        for (int c = 0; c < mm; ++c) {
            int p = c;
            for (int i = c + 1; i < mm; ++i)
                if (std::fabs(lu[static_cast<std::size_t>(i) * mm + c]) >
                    std::fabs(lu[static_cast<std::size_t>(p) * mm + c]))
                    p = i;
            if (std::fabs(lu[static_cast<std::size_t>(p) * mm + c]) < 1e-14) return false;
            if (p != c) {
                for (int k = 0; k < mm; ++k)
                    std::swap(lu[static_cast<std::size_t>(p) * mm + k],
                              lu[static_cast<std::size_t>(c) * mm + k]);
                std::swap(perm[static_cast<std::size_t>(p)], perm[static_cast<std::size_t>(c)]);
            }
            const double inv = 1.0 / lu[static_cast<std::size_t>(c) * mm + c];
            for (int i = c + 1; i < mm; ++i) {
                const double f = lu[static_cast<std::size_t>(i) * mm + c] * inv;
                lu[static_cast<std::size_t>(i) * mm + c] = f;
                if (f != 0.0)
                    for (int k = c + 1; k < mm; ++k)
                        lu[static_cast<std::size_t>(i) * mm + k] -=
                            f * lu[static_cast<std::size_t>(c) * mm + k];
            }
        }
        auto lu_solve = [&](const std::vector<double>& rhs, std::vector<double>& sol) {
            sol.resize(static_cast<std::size_t>(mm));
            for (int i = 0; i < mm; ++i) sol[static_cast<std::size_t>(i)] = rhs[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
            for (int i = 0; i < mm; ++i)
                for (int k = 0; k < i; ++k)
                    sol[static_cast<std::size_t>(i)] -= lu[static_cast<std::size_t>(i) * mm + k] * sol[static_cast<std::size_t>(k)];
            for (int i = mm - 1; i >= 0; --i) {
                for (int k = i + 1; k < mm; ++k)
                    sol[static_cast<std::size_t>(i)] -= lu[static_cast<std::size_t>(i) * mm + k] * sol[static_cast<std::size_t>(k)];
                sol[static_cast<std::size_t>(i)] /= lu[static_cast<std::size_t>(i) * mm + i];
            }
        };
        std::vector<double> b(static_cast<std::size_t>(mm));
        for (int i = 0; i < mm; ++i) b[static_cast<std::size_t>(i)] = internal_rhs(meta_[static_cast<std::size_t>(i)]);
        std::vector<double> xb;
        lu_solve(b, xb);
        // one refinement pass with long-double residual accumulation
        std::vector<double> resid(static_cast<std::size_t>(mm));
        for (int i = 0; i < mm; ++i) {
            long double acc = b[static_cast<std::size_t>(i)];
            for (int k = 0; k < mm; ++k)
                acc -= static_cast<long double>(B[static_cast<std::size_t>(i) * mm + k]) * xb[static_cast<std::size_t>(k)];
            resid[static_cast<std::size_t>(i)] = static_cast<double>(acc);
        }
        std::vector<double> dx;
        lu_solve(resid, dx);
        for (int i = 0; i < mm; ++i) xb[static_cast<std::size_t>(i)] += dx[static_cast<std::size_t>(i)];

        std::fill(x.begin(), x.end(), 0.0);
        for (int k = 0; k < mm; ++k)
            if (basis_[static_cast<std::size_t>(k)] < n_)
                x[static_cast<std::size_t>(basis_[static_cast<std::size_t>(k)])] = xb[static_cast<std::size_t>(k)];
        return true;
    }

    LpSolution extract() {
        const double* o2 = obj2();
        for (int j = 0; j < cols_; ++j) {
            if (o2[j] < -kCertTol) {
                throw std::runtime_error("simplex optimality certificate violated");
            }
        }
        std::vector<double> x(static_cast<std::size_t>(n_), 0.0);
        double min_basic = 0.0;
        for (int i = 0; i < m_; ++i) {
            const double v = row(i)[rhs_col_];
            min_basic = std::min(min_basic, v);
            if (basis_[static_cast<std::size_t>(i)] < n_)
                x[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] = v;
        }
        if (residual(x) > kResidTrigger || min_basic < -kResidTrigger) {
            std::vector<double> fresh = x;
            if (refactor(fresh) && residual(fresh) <= residual(x)) x = fresh;
        }
        long double obj = 0.0;
        for (int j = 0; j < n_; ++j)
            obj += static_cast<long double>(lp_.objective[static_cast<std::size_t>(j)]) * x[static_cast<std::size_t>(j)];
        return {LpStatus::optimal, std::move(x), static_cast<double>(obj)};
    }
};

}  // namespace

void validate(const LinearProgram& lp) {
    if (lp.num_vars == 0) throw std::invalid_argument("LP needs at least one variable");
    if (lp.objective.size() != lp.num_vars) {
        throw std::invalid_argument("objective length must equal num_vars");
    }
    for (double c : lp.objective) {
        if (!std::isfinite(c)) throw std::invalid_argument("objective must be finite");
    }
    for (const auto& r : lp.rows) {
        if (r.coeffs.size() != lp.num_vars) {
            throw std::invalid_argument("row length must equal num_vars");
        }
        if (!std::isfinite(r.rhs)) throw std::invalid_argument("rhs must be finite");
        for (double a : r.coeffs) {
            if (!std::isfinite(a)) throw std::invalid_argument("coefficients must be finite");
        }
    }
    if (!lp.upper_bound.empty()) {
        if (lp.upper_bound.size() != lp.num_vars) {
            throw std::invalid_argument("upper_bound length must equal num_vars");
        }
        for (double u : lp.upper_bound) {
            if (std::isnan(u) || u == -kInf) {
                throw std::invalid_argument("upper bounds must be numbers or +infinity");
            }
        }
    }
}

LpSolution solve(const LinearProgram& lp) {
    validate(lp);
    Simplex s(lp);
    return s.run();
}

void dump(const LinearProgram& lp, std::ostream& out) {
    const auto flags = out.flags();
    const auto prec = out.precision();
    out << std::fixed << std::setprecision(9);
    out << "minimize\n ";
    for (double c : lp.objective) out << ' ' << c;
    out << "\nsubject to\n";
    for (const auto& r : lp.rows) {
        out << ' ';
        for (double a : r.coeffs) out << ' ' << a;
        out << (r.relation == Relation::equal ? "  =  " : "  <= ") << r.rhs << '\n';
    }
    out << "bounds\n";
    for (std::size_t j = 0; j < lp.num_vars; ++j) {
        out << "  0 <= x" << j;
        if (!lp.upper_bound.empty() && lp.upper_bound[j] != kInf) {
            out << " <= " << lp.upper_bound[j];
        }
        out << '\n';
    }
    out.flags(flags);
    out.precision(prec);
}

}  // namespace cfa
