#include "aggrum/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aggrum::lp {

int LinearSystem::add_column(const std::vector<std::pair<int, double>>& entries) {
    for (const auto& [r, v] : entries) {
        if (v == 0.0) continue;
        row_.push_back(r);
        val_.push_back(v);
    }
    start_.push_back(row_.size());
    return cols() - 1;
}

std::vector<double> LinearSystem::multiply(const std::vector<double>& x) const {
    std::vector<double> out(b_.size(), 0.0);
    for (int j = 0; j < cols(); ++j)
        for (std::size_t k = col_begin(j); k < col_end(j); ++k)
            out[static_cast<std::size_t>(row_[k])] += val_[k] * x[static_cast<std::size_t>(j)];
    return out;
}

namespace {

constexpr double kReducedCostTol = 1e-11;
constexpr double kPivotTol = 1e-9;
constexpr int kRefactorEvery = 64;
constexpr int kDegenerateSwitch = 50;
constexpr int kPricingWindow = 2000;
constexpr double kRatioSlack = 1e-12;

class PhaseOne {
public:
    PhaseOne(const LinearSystem& sys) : sys_(sys), m_(sys.rows()), n_(sys.cols()) {
        sign_.resize(static_cast<std::size_t>(m_));
        b_ = Eigen::VectorXd(m_);
        for (int i = 0; i < m_; ++i) {
            double v = sys.rhs()[static_cast<std::size_t>(i)];
            sign_[static_cast<std::size_t>(i)] = v < 0 ? -1.0 : 1.0;
            b_(i) = std::abs(v);
        }
        // Variables 0..m-1 are artificials, m..m+n-1 structural columns.
        basis_.resize(static_cast<std::size_t>(m_));
        for (int i = 0; i < m_; ++i) basis_[static_cast<std::size_t>(i)] = i;
        in_basis_.assign(static_cast<std::size_t>(m_ + n_), false);
        for (int i = 0; i < m_; ++i) in_basis_[static_cast<std::size_t>(i)] = true;
        binv_ = Eigen::MatrixXd::Identity(m_, m_);
        xb_ = b_;
    }

    int run() {
        int iter = 0;
        int since_refactor = 0;
        int degenerate_run = 0;
        int price_start = 0;
        const int refactor_every = kRefactorEvery + m_ / 4;
        Eigen::VectorXd u(m_);
        Eigen::RowVectorXd pi = duals();
        for (;;) {
            // Dantzig pricing; Bland's rule after a run of degenerate pivots guards against cycling.
            const bool bland = degenerate_run >= kDegenerateSwitch;
            // Partial pricing over a rotating window of columns keeps large problems cheap.
            int enter = -1;
            double best_d = -kReducedCostTol;
            const int window = std::max(kPricingWindow, n_ / 8);
            for (int scanned = 0; scanned < n_; ++scanned) {
                int j = bland ? scanned : (price_start + scanned) % n_;
                if (!bland && enter >= 0 && scanned >= window) break;
                if (in_basis_[static_cast<std::size_t>(m_ + j)]) continue;
                double d = reduced_cost(pi, j);
                if (d < best_d) {
                    enter = j;
                    if (bland) break;
                    best_d = d;
                }
            }
            if (enter < 0) break;
            price_start = (enter + 1) % n_;
            column(enter, u);

            // Two-pass ratio test: bound the step with a small feasibility slack, then pick a stable pivot.
            double theta = INFINITY;
            for (int i = 0; i < m_; ++i)
                if (u(i) > kPivotTol) theta = std::min(theta, (std::max(xb_(i), 0.0) + kRatioSlack) / u(i));
            if (!std::isfinite(theta)) break;
            int leave = -1;
            for (int i = 0; i < m_; ++i) {
                if (u(i) <= kPivotTol || std::max(xb_(i), 0.0) / u(i) > theta) continue;
                if (leave < 0) {
                    leave = i;
                } else if (bland) {
                    if (basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]) leave = i;
                } else if (u(i) > u(leave)) {
                    leave = i;
                }
            }
            const double step = std::max(xb_(leave), 0.0) / u(leave);
            degenerate_run = step <= 1e-14 ? degenerate_run + 1 : 0;
            const double d_enter = reduced_cost(pi, enter);
            pi += (d_enter / u(leave)) * binv_.row(leave);
            pivot(leave, m_ + enter, u);
            ++iter;
            if (++since_refactor >= refactor_every) {
                refactor();
                pi = duals();
                since_refactor = 0;
            }
        }
        refactor();
        return iter;
    }

    Eigen::RowVectorXd duals() const {
        Eigen::RowVectorXd pi = Eigen::RowVectorXd::Zero(m_);
        for (int i = 0; i < m_; ++i)
            if (basis_[static_cast<std::size_t>(i)] < m_) pi += binv_.row(i);
        return pi;
    }

    double reduced_cost(const Eigen::RowVectorXd& pi, int j) const {
        double d = 0.0;
        for (std::size_t k = sys_.col_begin(j); k < sys_.col_end(j); ++k) {
            int r = sys_.row_at(k);
            d -= pi(r) * sys_.value_at(k) * sign_[static_cast<std::size_t>(r)];
        }
        return d;
    }

    double objective() const {
        double s = 0.0;
        for (int i = 0; i < m_; ++i)
            if (basis_[static_cast<std::size_t>(i)] < m_) s += std::max(xb_(i), 0.0);
        return s;
    }

    std::vector<double> solution() const {
        std::vector<double> x(static_cast<std::size_t>(n_), 0.0);
        for (int i = 0; i < m_; ++i) {
            int v = basis_[static_cast<std::size_t>(i)];
            if (v >= m_) x[static_cast<std::size_t>(v - m_)] = std::max(xb_(i), 0.0);
        }
        return x;
    }

    std::vector<double> farkas() const {
        Eigen::RowVectorXd pi = duals();
        std::vector<double> y(static_cast<std::size_t>(m_));
        for (int i = 0; i < m_; ++i) y[static_cast<std::size_t>(i)] = pi(i) * sign_[static_cast<std::size_t>(i)];
        return y;
    }

private:
    void column(int j, Eigen::VectorXd& u) const {
        u.setZero();
        for (std::size_t k = sys_.col_begin(j); k < sys_.col_end(j); ++k) {
            int r = sys_.row_at(k);
            u += binv_.col(r) * (sys_.value_at(k) * sign_[static_cast<std::size_t>(r)]);
        }
    }

    void pivot(int r, int var, const Eigen::VectorXd& u) {
        Eigen::RowVectorXd prow = binv_.row(r) / u(r);
        binv_.noalias() -= u * prow;
        binv_.row(r) = prow;
        double step = std::max(xb_(r), 0.0) / u(r);
        xb_ -= u * step;
        xb_(r) = step;
        in_basis_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])] = false;
        basis_[static_cast<std::size_t>(r)] = var;
        in_basis_[static_cast<std::size_t>(var)] = true;
    }

    void refactor() {
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m_, m_);
        for (int i = 0; i < m_; ++i) {
            int v = basis_[static_cast<std::size_t>(i)];
            if (v < m_) {
                B(v, i) = 1.0;
            } else {
                for (std::size_t k = sys_.col_begin(v - m_); k < sys_.col_end(v - m_); ++k) {
                    int r = sys_.row_at(k);
                    B(r, i) = sys_.value_at(k) * sign_[static_cast<std::size_t>(r)];
                }
            }
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
        binv_ = lu.inverse();
        xb_ = lu.solve(b_);
        if (!binv_.allFinite() || !xb_.allFinite()) throw std::runtime_error("simplex basis became singular");
    }

    const LinearSystem& sys_;
    int m_, n_;
    std::vector<double> sign_;
    Eigen::VectorXd b_;
    std::vector<int> basis_;
    std::vector<bool> in_basis_;
    Eigen::MatrixXd binv_;
    Eigen::VectorXd xb_;
};

}  // namespace

FeasibilityResult solve_feasibility(const LinearSystem& sys, double tol) {
    FeasibilityResult res;
    if (sys.rows() == 0) {
        res.feasible = true;
        res.x.assign(static_cast<std::size_t>(sys.cols()), 0.0);
        return res;
    }
    PhaseOne p1(sys);
    res.iterations = p1.run();
    res.phase_one = p1.objective();
    res.x = p1.solution();
    auto ax = sys.multiply(res.x);
    for (int i = 0; i < sys.rows(); ++i)
        res.residual = std::max(res.residual, std::abs(ax[static_cast<std::size_t>(i)] - sys.rhs()[static_cast<std::size_t>(i)]));
    res.feasible = res.residual <= tol;
    if (!res.feasible) {
        res.farkas = p1.farkas();
        res.x.clear();
    }
    return res;
}

}  // namespace aggrum::lp
