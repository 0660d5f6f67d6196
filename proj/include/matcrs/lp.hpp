#pragma once

#include <optional>
#include <string>
#include <vector>

#include "matcrs/errors.hpp"
#include "matcrs/rational.hpp"

namespace matcrs {

enum class Relation { LessEq, Equal, GreaterEq };
enum class LpStatus { Optimal, Infeasible, Unbounded };

/// A linear program over exact rationals. Variables are nonnegative with
/// optional upper bounds.
struct LinearProgram {
    struct Row {
        std::vector<Rat> coeffs;
        Relation rel;
        Rat rhs;
    };

    bool maximize = true;
    std::vector<Rat> objective;
    std::vector<Row> rows;
    std::vector<std::optional<Rat>> upper_bounds;  // empty or one entry per variable

    int num_vars() const { return static_cast<int>(objective.size()); }

    void add_row(std::vector<Rat> coeffs, Relation rel, Rat rhs) {
        rows.push_back({std::move(coeffs), rel, std::move(rhs)});
    }
};

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    Rat objective = 0;
    std::vector<Rat> primal;
    // One dual per input row, in the input problem's convention: objective
    // value equals sum_r dual[r] * rhs[r] at optimality (upper bounds included
    // via their implicit rows, whose duals are not reported).
    std::vector<Rat> duals;
};

namespace detail {

/// Dense tableau simplex, exact rationals, Bland's rule throughout. The
/// tableau carries one artificial column per row so the basis inverse stays
/// readable; artificials never re-enter once driven out.
class SimplexTableau {
public:
    SimplexTableau(const LinearProgram& lp) {
        nvars_ = lp.num_vars();
        // Upper bounds become explicit rows; duals for them are dropped later.
        std::vector<LinearProgram::Row> rows = lp.rows;
        if (!lp.upper_bounds.empty()) {
            for (int j = 0; j < nvars_; ++j) {
                if (!lp.upper_bounds[j]) continue;
                std::vector<Rat> coeffs(nvars_, 0);
                coeffs[j] = 1;
                rows.push_back({std::move(coeffs), Relation::LessEq, *lp.upper_bounds[j]});
            }
        }
        nrows_ = static_cast<int>(rows.size());
        if (nvars_ > kSizeCap || nrows_ > kSizeCap)
            throw CapExceeded("lp: dimensions exceed desk-scale cap");
        for (const auto& r : rows)
            if (static_cast<int>(r.coeffs.size()) != nvars_)
                throw std::invalid_argument("lp: row width mismatch");

        // Internal form: minimize. Normalize each row to nonnegative rhs.
        cost_.assign(nvars_, 0);
        for (int j = 0; j < nvars_; ++j) cost_[j] = lp.maximize ? -lp.objective[j] : lp.objective[j];

        nslack_ = 0;
        for (const auto& r : rows)
            if (r.rel != Relation::Equal) ++nslack_;
        ncols_ = nvars_ + nslack_ + nrows_;  // vars, slacks, artificials
        art0_ = nvars_ + nslack_;

        tab_.assign(nrows_, std::vector<Rat>(ncols_ + 1, 0));
        row_sign_.assign(nrows_, 1);
        basis_.assign(nrows_, -1);
        int next_slack = nvars_;
        for (int r = 0; r < nrows_; ++r) {
            int sign = rows[r].rhs < 0 ? -1 : 1;
            row_sign_[r] = sign;
            for (int j = 0; j < nvars_; ++j) tab_[r][j] = sign * rows[r].coeffs[j];
            tab_[r][ncols_] = sign * rows[r].rhs;
            Relation rel = rows[r].rel;
            if (sign < 0) {
                if (rel == Relation::LessEq) rel = Relation::GreaterEq;
                else if (rel == Relation::GreaterEq) rel = Relation::LessEq;
            }
            if (rows[r].rel != Relation::Equal) {
                tab_[r][next_slack] = (rel == Relation::LessEq) ? 1 : -1;
                ++next_slack;
            }
            tab_[r][art0_ + r] = 1;
            basis_[r] = art0_ + r;
        }
        ndropped_duals_ = nrows_ - static_cast<int>(lp.rows.size());
    }

    std::string dump_tableau() const {
        std::string out;
        for (int r = 0; r < nrows_; ++r) {
            out += "x" + std::to_string(basis_[r]) + " |";
            for (int j = 0; j <= ncols_; ++j) out += " " + rat_to_string(tab_[r][j]);
            out += "\n";
        }
        out += "z  |";
        for (int j = 0; j <= ncols_; ++j) out += " " + rat_to_string(cost_row_[j]);
        return out + "\n";
    }

    LpSolution run(const LinearProgram& lp) {
        // Phase 1: minimize the artificial sum (bounded below by 0, so an
        // unbounded ray here would be a pivoting bug).
        std::vector<Rat> phase1(ncols_, 0);
        for (int r = 0; r < nrows_; ++r) phase1[art0_ + r] = 1;
        rebuild_cost_row(phase1);
        if (!pivot_until_optimal()) throw std::logic_error("lp: phase 1 diverged");
        if (objective_value(phase1) != 0) return {LpStatus::Infeasible, 0, {}, {}};

        // Phase 2: the real objective; artificials stay barred and any still
        // basic (at value 0) are kicked out by degenerate pivots on demand.
        std::vector<Rat> phase2(ncols_, 0);
        for (int j = 0; j < nvars_; ++j) phase2[j] = cost_[j];
        rebuild_cost_row(phase2);
        if (!pivot_until_optimal()) return {LpStatus::Unbounded, 0, {}, {}};

        LpSolution sol;
        sol.status = LpStatus::Optimal;
        sol.primal.assign(nvars_, 0);
        for (int r = 0; r < nrows_; ++r)
            if (basis_[r] < nvars_) sol.primal[basis_[r]] = tab_[r][ncols_];
        Rat internal_obj = 0;
        for (int j = 0; j < nvars_; ++j) internal_obj += cost_[j] * sol.primal[j];
        sol.objective = lp.maximize ? -internal_obj : internal_obj;

        // Duals from the artificial block: y = c_B * B^{-1}, mapped back
        // through row normalization and the max/min flip.
        int nduals = nrows_ - ndropped_duals_;
        sol.duals.assign(nduals, 0);
        for (int r = 0; r < nduals; ++r) {
            Rat y = 0;
            for (int k = 0; k < nrows_; ++k) {
                if (basis_[k] < nvars_) y += cost_[basis_[k]] * tab_[k][art0_ + r];
            }
            y *= row_sign_[r];
            sol.duals[r] = lp.maximize ? -y : y;
        }
        verify_certificates(lp, sol);
        return sol;
    }

    static constexpr int kSizeCap = 5000;

private:
    void rebuild_cost_row(const std::vector<Rat>& c) {
        cost_row_.assign(ncols_ + 1, 0);
        for (int j = 0; j < ncols_; ++j) {
            cost_row_[j] = c[j];
            for (int r = 0; r < nrows_; ++r) cost_row_[j] -= c[basis_[r]] * tab_[r][j];
        }
        for (int r = 0; r < nrows_; ++r) cost_row_[ncols_] -= c[basis_[r]] * tab_[r][ncols_];
    }

    Rat objective_value(const std::vector<Rat>& c) {
        Rat v = 0;
        for (int r = 0; r < nrows_; ++r) v += c[basis_[r]] * tab_[r][ncols_];
        return v;
    }

    // Returns false on unbounded.
    bool pivot_until_optimal() {
        while (true) {
            // Bland: entering = smallest column index with negative reduced
            // cost; artificial columns never enter.
            int enter = -1;
            for (int j = 0; j < art0_; ++j) {
                if (cost_row_[j] < 0) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return true;

            // A basic artificial sitting at value 0 with a nonzero entry in
            // the entering column leaves first, via a degenerate pivot;
            // otherwise it could drift positive and break feasibility.
            int leave = -1;
            for (int r = 0; r < nrows_; ++r) {
                if (basis_[r] >= art0_ && tab_[r][ncols_] == 0 && tab_[r][enter] != 0) {
                    leave = r;
                    break;
                }
            }
            if (leave < 0) {
                // Standard ratio test; ties resolved by smallest basic column
                // index (Bland's anti-cycling choice).
                std::optional<Rat> best;
                for (int r = 0; r < nrows_; ++r) {
                    if (tab_[r][enter] <= 0) continue;
                    Rat ratio = tab_[r][ncols_] / tab_[r][enter];
                    if (!best || ratio < *best ||
                        (ratio == *best && basis_[r] < basis_[leave])) {
                        best = ratio;
                        leave = r;
                    }
                }
                if (leave < 0) return false;  // unbounded direction
            }
            pivot(leave, enter);
        }
    }

    void pivot(int row, int col) {
        Rat p = tab_[row][col];
        for (int j = 0; j <= ncols_; ++j) tab_[row][j] /= p;
        for (int r = 0; r < nrows_; ++r) {
            if (r == row || tab_[r][col] == 0) continue;
            Rat f = tab_[r][col];
            for (int j = 0; j <= ncols_; ++j) tab_[r][j] -= f * tab_[row][j];
        }
        if (cost_row_[col] != 0) {
            Rat f = cost_row_[col];
            for (int j = 0; j <= ncols_; ++j) cost_row_[j] -= f * tab_[row][j];
        }
        basis_[row] = col;
    }

    /// Exact optimality certificates: primal feasibility, strong duality, dual
    /// feasibility (reduced costs), and complementary slackness, all at zero
    /// tolerance. A failure here is a solver bug, never an input property.
    void verify_certificates(const LinearProgram& lp, const LpSolution& sol) const {
        auto fail = [](const char* what) { throw std::logic_error(std::string("lp certificate: ") + what); };
        Rat dual_obj = 0;
        for (std::size_t r = 0; r < lp.rows.size(); ++r) {
            const auto& row = lp.rows[r];
            Rat lhs = 0;
            for (int j = 0; j < lp.num_vars(); ++j) lhs += row.coeffs[j] * sol.primal[j];
            bool tight = lhs == row.rhs;
            if (row.rel == Relation::LessEq && lhs > row.rhs) fail("primal row violated");
            if (row.rel == Relation::GreaterEq && lhs < row.rhs) fail("primal row violated");
            if (row.rel == Relation::Equal && !tight) fail("primal row violated");
            // Sign convention and complementary slackness.
            const Rat& y = sol.duals[r];
            int expected = lp.maximize ? 1 : -1;  // <= rows
            if (row.rel == Relation::LessEq && y * expected < 0) fail("dual sign");
            if (row.rel == Relation::GreaterEq && y * expected > 0) fail("dual sign");
            if (!tight && y != 0) fail("complementary slackness");
            dual_obj += y * row.rhs;
        }
        for (int j = 0; j < lp.num_vars(); ++j) {
            if (sol.primal[j] < 0) fail("negative variable");
            if (!lp.upper_bounds.empty() && lp.upper_bounds[j] && sol.primal[j] > *lp.upper_bounds[j])
                fail("upper bound violated");
        }
        Rat primal_obj = 0;
        for (int j = 0; j < lp.num_vars(); ++j) primal_obj += lp.objective[j] * sol.primal[j];
        if (primal_obj != sol.objective) fail("objective mismatch");
        // With upper bounds folded into rows, their dual contribution is not
        // reported; duality certificates are asserted when none are present.
        if (ndropped_duals_ == 0) {
            if (dual_obj != sol.objective) fail("strong duality");
            for (int j = 0; j < lp.num_vars(); ++j) {
                Rat ay = 0;
                for (std::size_t r = 0; r < lp.rows.size(); ++r)
                    ay += sol.duals[r] * lp.rows[r].coeffs[j];
                Rat reduced = lp.maximize ? ay - lp.objective[j] : lp.objective[j] - ay;
                if (reduced < 0) fail("dual infeasible");
                if (sol.primal[j] > 0 && reduced != 0) fail("complementary slackness (columns)");
            }
        }
    }

    int nvars_ = 0, nrows_ = 0, nslack_ = 0, ncols_ = 0, art0_ = 0;
    int ndropped_duals_ = 0;
    std::vector<Rat> cost_;
    std::vector<std::vector<Rat>> tab_;
    std::vector<Rat> cost_row_;
    std::vector<int> basis_;
    std::vector<int> row_sign_;
};

}  // namespace detail

/// Solves the program; when tableau_dump is given, it receives the final
/// simplex tableau as text.
inline LpSolution solve(const LinearProgram& lp, std::string* tableau_dump = nullptr) {
    detail::SimplexTableau tableau(lp);
    LpSolution sol = tableau.run(lp);
    if (tableau_dump) *tableau_dump = tableau.dump_tableau();
    return sol;
}

inline std::string to_string(const LinearProgram& lp) {
    std::string out = lp.maximize ? "max " : "min ";
    for (int j = 0; j < lp.num_vars(); ++j) {
        if (j > 0) out += " + ";
        out += rat_to_string(lp.objective[j]) + " x" + std::to_string(j);
    }
    out += "\n";
    for (const auto& row : lp.rows) {
        for (int j = 0; j < lp.num_vars(); ++j) {
            if (j > 0) out += " + ";
            out += rat_to_string(row.coeffs[j]) + " x" + std::to_string(j);
        }
        out += row.rel == Relation::LessEq ? " <= " : (row.rel == Relation::Equal ? " = " : " >= ");
        out += rat_to_string(row.rhs) + "\n";
    }
    return out;
}

}  // namespace matcrs
