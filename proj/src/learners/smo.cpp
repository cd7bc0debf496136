#include "autohybrid/learners/smo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace autohybrid::learners {

double rbf(std::span<const double> u, std::span<const double> v, double gamma) noexcept {
    double d2 = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double diff = u[k] - v[k];
        d2 += diff * diff;
    }
    return std::exp(-gamma * d2);
}

RbfKernel::RbfKernel(const RowMatrix& rows, double sigma)
    : rows_(rows), gamma_(1.0 / (2.0 * sigma * sigma)) {
    const auto n = rows_.rows();
    if (n <= kFullCacheLimit) {
        full_.resize(n, n);
        const auto d = static_cast<std::size_t>(rows_.cols());
        for (Eigen::Index i = 0; i < n; ++i) {
            full_(i, i) = 1.0;
            const std::span<const double> ri(rows_.row(i).data(), d);
            for (Eigen::Index j = 0; j < i; ++j) {
                const double k = rbf(ri, std::span<const double>(rows_.row(j).data(), d), gamma_);
                full_(i, j) = k;
                full_(j, i) = k;
            }
        }
    } else {
        scratch_.resize(static_cast<std::size_t>(n));
    }
}

std::span<const double> RbfKernel::row(Eigen::Index i) const {
    const auto n = rows_.rows();
    if (full_.size() > 0) {
        // column-major storage, symmetric: column i is row i
        return {full_.col(i).data(), static_cast<std::size_t>(n)};
    }
    if (scratch_row_ != i) {
        const auto d = static_cast<std::size_t>(rows_.cols());
        const std::span<const double> ri(rows_.row(i).data(), d);
        for (Eigen::Index j = 0; j < n; ++j)
            scratch_[static_cast<std::size_t>(j)] =
                j == i ? 1.0 : rbf(ri, std::span<const double>(rows_.row(j).data(), d), gamma_);
        scratch_row_ = i;
    }
    return {scratch_.data(), scratch_.size()};
}

double RbfKernel::operator()(Eigen::Index i, Eigen::Index j) const {
    if (full_.size() > 0) return full_(i, j);
    const auto d = static_cast<std::size_t>(rows_.cols());
    return rbf(std::span<const double>(rows_.row(i).data(), d),
               std::span<const double>(rows_.row(j).data(), d), gamma_);
}

namespace {

constexpr double kTau = 1e-12;

class Solver {
public:
    explicit Solver(SmoProblem&& pr) : pr_(std::move(pr)), l_(pr_.p.size()) {
        qd_.resize(l_);
        qi_.resize(l_);
        kidx_.resize(l_);
        grad_ = pr_.p;
        gbar_.assign(l_, 0.0);
        for (std::size_t t = 0; t < l_; ++t) {
            kidx_[t] = pr_.kernel_index(t);
            qd_[t] = pr_.kernel_row(t)[kidx_[t]];
        }
        for (std::size_t t = 0; t < l_; ++t) {
            if (pr_.alpha[t] == 0.0) continue;
            const double* k = pr_.kernel_row(t).data();
            const double yt = pr_.y[t];
            for (std::size_t s = 0; s < l_; ++s) {
                const double q = yt * pr_.y[s] * k[kidx_[s]];
                grad_[s] += q * pr_.alpha[t];
                if (at_upper(t)) gbar_[s] += q * pr_.upper[t];
            }
        }
        reset_active();
    }

    SmoResult run(double tolerance, std::size_t max_iterations) {
        SmoResult res;
        std::size_t iter = 0;
        std::size_t counter = std::min<std::size_t>(l_, 1000) + 1;
        for (; iter < max_iterations; ++iter) {
            if (--counter == 0) {
                counter = std::min<std::size_t>(l_, 1000);
                shrink(tolerance);
            }
            std::size_t i = 0;
            std::size_t j = 0;
            if (!select(tolerance, i, j)) {
                if (active_.size() == l_) {
                    res.converged = true;
                    break;
                }
                reconstruct_gradient();
                reset_active();
                counter = 1;
                if (!select(tolerance, i, j)) {
                    res.converged = true;
                    break;
                }
            }
            update(i, j);
        }
        if (!res.converged) {
            reconstruct_gradient();
            reset_active();
            std::size_t i = 0;
            std::size_t j = 0;
            res.converged = !select(tolerance, i, j);
        }
        res.iterations = iter;
        res.rho = rho();
        res.alpha = std::move(pr_.alpha);
        return res;
    }

private:
    bool at_upper(std::size_t t) const { return pr_.alpha[t] >= pr_.upper[t]; }
    bool at_lower(std::size_t t) const { return pr_.alpha[t] <= 0.0; }

    void reset_active() {
        active_.resize(l_);
        for (std::size_t t = 0; t < l_; ++t) active_[t] = t;
    }

    // y_t grad_t bounds of the working set, as in the selection rule
    void violation_extremes(double& gmax1, double& gmax2) const {
        gmax1 = -std::numeric_limits<double>::infinity();
        gmax2 = -std::numeric_limits<double>::infinity();
        for (const auto t : active_) {
            if (pr_.y[t] == +1) {
                if (!at_upper(t)) gmax1 = std::max(gmax1, -grad_[t]);
                if (!at_lower(t)) gmax2 = std::max(gmax2, grad_[t]);
            } else {
                if (!at_upper(t)) gmax2 = std::max(gmax2, -grad_[t]);
                if (!at_lower(t)) gmax1 = std::max(gmax1, grad_[t]);
            }
        }
    }

    bool removable(std::size_t t, double gmax1, double gmax2) const {
        if (at_upper(t)) return pr_.y[t] == +1 ? -grad_[t] > gmax1 : -grad_[t] > gmax2;
        if (at_lower(t)) return pr_.y[t] == +1 ? grad_[t] > gmax2 : grad_[t] > gmax1;
        return false;
    }

    void shrink(double tolerance) {
        double gmax1 = 0.0;
        double gmax2 = 0.0;
        violation_extremes(gmax1, gmax2);
        if (!unshrunk_ && gmax1 + gmax2 <= 10.0 * tolerance) {
            unshrunk_ = true;
            reconstruct_gradient();
            reset_active();
        }
        std::erase_if(active_, [&](std::size_t t) { return removable(t, gmax1, gmax2); });
    }

    void reconstruct_gradient() {
        if (active_.size() == l_) return;
        std::vector<char> is_active(l_, 0);
        for (const auto t : active_) is_active[t] = 1;
        std::vector<std::size_t> inactive;
        for (std::size_t t = 0; t < l_; ++t)
            if (!is_active[t]) {
                inactive.push_back(t);
                grad_[t] = gbar_[t] + pr_.p[t];
            }
        for (std::size_t s = 0; s < l_; ++s) {
            if (at_upper(s) || at_lower(s)) continue;
            const double* k = pr_.kernel_row(s).data();
            const double ys = pr_.y[s] * pr_.alpha[s];
            for (const auto t : inactive) grad_[t] += ys * pr_.y[t] * k[kidx_[t]];
        }
    }

    bool select(double tolerance, std::size_t& out_i, std::size_t& out_j) {
        double gmax = -std::numeric_limits<double>::infinity();
        std::ptrdiff_t gmax_idx = -1;
        for (const auto t : active_) {
            if (pr_.y[t] == +1) {
                if (!at_upper(t) && -grad_[t] >= gmax) {
                    gmax = -grad_[t];
                    gmax_idx = static_cast<std::ptrdiff_t>(t);
                }
            } else if (!at_lower(t) && grad_[t] >= gmax) {
                gmax = grad_[t];
                gmax_idx = static_cast<std::ptrdiff_t>(t);
            }
        }
        if (gmax_idx < 0) return false;
        const auto i = static_cast<std::size_t>(gmax_idx);
        const double* ki = pr_.kernel_row(i).data();
        const double yi = pr_.y[i];

        double gmax2 = -std::numeric_limits<double>::infinity();
        double obj_min = std::numeric_limits<double>::infinity();
        std::ptrdiff_t gmin_idx = -1;
        for (const auto t : active_) {
            // signed Q_it, kept for update()
            const double q = (pr_.y[t] > 0 ? yi : -yi) * ki[kidx_[t]];
            qi_[t] = q;
            if (pr_.y[t] == +1) {
                if (at_lower(t)) continue;
                const double grad_diff = gmax + grad_[t];
                gmax2 = std::max(gmax2, grad_[t]);
                if (grad_diff > 0.0) {
                    double quad = qd_[i] + qd_[t] - 2.0 * yi * q;
                    const double obj = -(grad_diff * grad_diff) / (quad > 0.0 ? quad : kTau);
                    if (obj <= obj_min) {
                        gmin_idx = static_cast<std::ptrdiff_t>(t);
                        obj_min = obj;
                    }
                }
            } else {
                if (at_upper(t)) continue;
                const double grad_diff = gmax - grad_[t];
                gmax2 = std::max(gmax2, -grad_[t]);
                if (grad_diff > 0.0) {
                    double quad = qd_[i] + qd_[t] + 2.0 * yi * q;
                    const double obj = -(grad_diff * grad_diff) / (quad > 0.0 ? quad : kTau);
                    if (obj <= obj_min) {
                        gmin_idx = static_cast<std::ptrdiff_t>(t);
                        obj_min = obj;
                    }
                }
            }
        }
        if (gmax + gmax2 < tolerance || gmin_idx < 0) return false;
        out_i = i;
        out_j = static_cast<std::size_t>(gmin_idx);
        return true;
    }

    void update(std::size_t i, std::size_t j) {
        // qi_ holds the signed row of i over the active set, from select()
        auto& a = pr_.alpha;
        const double ci = pr_.upper[i];
        const double cj = pr_.upper[j];
        const double old_ai = a[i];
        const double old_aj = a[j];
        const bool upper_i = at_upper(i);
        const bool upper_j = at_upper(j);

        if (pr_.y[i] != pr_.y[j]) {
            double quad = qd_[i] + qd_[j] + 2.0 * qi_[j];
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad_[i] - grad_[j]) / quad;
            const double diff = a[i] - a[j];
            a[i] += delta;
            a[j] += delta;
            if (diff > 0.0) {
                if (a[j] < 0.0) {
                    a[j] = 0.0;
                    a[i] = diff;
                }
            } else if (a[i] < 0.0) {
                a[i] = 0.0;
                a[j] = -diff;
            }
            if (diff > ci - cj) {
                if (a[i] > ci) {
                    a[i] = ci;
                    a[j] = ci - diff;
                }
            } else if (a[j] > cj) {
                a[j] = cj;
                a[i] = cj + diff;
            }
        } else {
            double quad = qd_[i] + qd_[j] - 2.0 * qi_[j];
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad_[i] - grad_[j]) / quad;
            const double sum = a[i] + a[j];
            a[i] -= delta;
            a[j] += delta;
            if (sum > ci) {
                if (a[i] > ci) {
                    a[i] = ci;
                    a[j] = sum - ci;
                }
            } else if (a[j] < 0.0) {
                a[j] = 0.0;
                a[i] = sum;
            }
            if (sum > cj) {
                if (a[j] > cj) {
                    a[j] = cj;
                    a[i] = sum - cj;
                }
            } else if (a[i] < 0.0) {
                a[i] = 0.0;
                a[j] = sum;
            }
        }

        const double dai = a[i] - old_ai;
        const double daj = a[j] - old_aj;
        const double* kj = pr_.kernel_row(j).data();
        const double yj = pr_.y[j];
        for (const auto t : active_)
            grad_[t] += qi_[t] * dai + (pr_.y[t] > 0 ? yj : -yj) * kj[kidx_[t]] * daj;

        if (upper_i != at_upper(i)) update_gbar(i, upper_i ? -ci : ci);
        if (upper_j != at_upper(j)) update_gbar(j, upper_j ? -cj : cj);
    }

    void update_gbar(std::size_t s, double weight) {
        const double* k = pr_.kernel_row(s).data();
        const double ys = pr_.y[s] * weight;
        for (std::size_t t = 0; t < l_; ++t) gbar_[t] += ys * pr_.y[t] * k[kidx_[t]];
    }

    double rho() const {
        double ub = std::numeric_limits<double>::infinity();
        double lb = -std::numeric_limits<double>::infinity();
        double sum_free = 0.0;
        std::size_t n_free = 0;
        for (std::size_t t = 0; t < l_; ++t) {
            const double yg = pr_.y[t] * grad_[t];
            if (at_upper(t)) {
                if (pr_.y[t] == -1) ub = std::min(ub, yg);
                else lb = std::max(lb, yg);
            } else if (at_lower(t)) {
                if (pr_.y[t] == +1) ub = std::min(ub, yg);
                else lb = std::max(lb, yg);
            } else {
                ++n_free;
                sum_free += yg;
            }
        }
        if (n_free > 0) return sum_free / static_cast<double>(n_free);
        return (ub + lb) / 2.0;
    }

    SmoProblem pr_;
    std::size_t l_;
    std::vector<double> grad_;
    std::vector<double> gbar_;           // sum over upper-bounded s of upper_s Q_ts
    std::vector<double> qd_;
    std::vector<double> qi_;
    std::vector<std::size_t> kidx_;
    std::vector<std::size_t> active_;
    bool unshrunk_ = false;
};

} // namespace

SmoResult solve_smo(SmoProblem problem, double tolerance, std::size_t max_iterations) {
    Solver solver(std::move(problem));
    return solver.run(tolerance, max_iterations);
}

} // namespace autohybrid::learners
