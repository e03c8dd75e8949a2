#include "hdch/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "hdch/error.hpp"

namespace hdch {

double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

double chi(double r) { return 1.0 - smooth_step(3.0 * (r - 1.0)); }

double phi(double r) { return chi(0.5 * r) - chi(r); }

void BesovParams::validate() const {
    auto ok = [](double q) { return q >= 1.0; };  // also rejects NaN
    if (!std::isfinite(s)) throw ConfigError("Besov index s must be finite");
    if (!ok(p) || !ok(r)) {
        std::ostringstream msg;
        msg << "Besov exponents must satisfy 1 <= p, r <= inf (got p=" << p << ", r=" << r << ")";
        throw ConfigError(msg.str());
    }
}

DyadicPartition::DyadicPartition(GridPtr grid) : grid_(std::move(grid)) {
    const auto r2 = grid_->radius_squared();
    lower_.resize(r2.size());
    lower_weight_.resize(r2.size());
    int top = kMinBlock;
    for (std::size_t k = 0; k < r2.size(); ++k) {
        const double r = std::sqrt(r2[k]);
        int lo = kMinBlock;
        double a = 1.0;
        if (r > 1.0) {
            // m = smallest integer with 2^m >= r; the point sits in blocks m-2 and m-1.
            int e = 0;
            const double f = std::frexp(r, &e);
            const int m = (f == 0.5) ? e - 1 : e;
            lo = m - 2;
            a = chi(std::ldexp(r, -(m - 1)));
        }
        lower_[k] = static_cast<std::int8_t>(lo);
        lower_weight_[k] = a;
        top = std::max(top, a < 1.0 ? lo + 1 : lo);
    }
    max_block_ = top;
}

std::vector<double> DyadicPartition::block_multiplier(int j) const {
    std::vector<double> m(lower_.size());
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = weight(k, j);
    return m;
}

std::vector<double> DyadicPartition::low_pass_multiplier(int j) const {
    std::vector<double> m(lower_.size());
    for (std::size_t k = 0; k < m.size(); ++k) {
        const int lo = lower_[k];
        if (j <= lo) {
            m[k] = 0.0;
        } else if (j == lo + 1) {
            m[k] = lower_weight_[k];
        } else {
            m[k] = 1.0;
        }
    }
    return m;
}

DyadicPartitionPtr build_partition(GridPtr grid) { return std::make_shared<const DyadicPartition>(std::move(grid)); }

namespace {

void check_partition_grid(const Grid& g, const DyadicPartition& partition) {
    require_same_grid(g, partition.grid(), "Littlewood-Paley");
}

}  // namespace

ScalarField dyadic_block(const ScalarField& u, int j, const DyadicPartition& partition) {
    check_partition_grid(u.grid(), partition);
    if (j < DyadicPartition::kMinBlock || j > partition.max_block()) return ScalarField::zeros(u.grid_ptr());
    return apply_multiplier(u, partition.block_multiplier(j));
}

VectorField dyadic_block(const VectorField& u, int j, const DyadicPartition& partition) {
    std::vector<ScalarField> c;
    for (const auto& x : u.components()) c.push_back(dyadic_block(x, j, partition));
    return VectorField(std::move(c));
}

ScalarField low_freq_cutoff(const ScalarField& u, int j, const DyadicPartition& partition) {
    check_partition_grid(u.grid(), partition);
    return apply_multiplier(u, partition.low_pass_multiplier(j));
}

VectorField low_freq_cutoff(const VectorField& u, int j, const DyadicPartition& partition) {
    std::vector<ScalarField> c;
    for (const auto& x : u.components()) c.push_back(low_freq_cutoff(x, j, partition));
    return VectorField(std::move(c));
}

std::vector<BlockNorm> block_norms(const VectorField& u, const BesovParams& params,
                                   const DyadicPartition& partition, const BesovOptions& options) {
    params.validate();
    const Grid& g = u.grid();
    check_partition_grid(g, partition);
    if (options.check_resolution) {
        const double tail = spectral_tail_fraction(u);
        if (tail > options.resolution_tolerance) {
            std::ostringstream msg;
            msg << "field is unresolved: spectral energy fraction " << tail
                << " above the dealias cutoff exceeds " << options.resolution_tolerance;
            throw UnresolvedFieldError(msg.str(), tail);
        }
    }

    const int count = partition.block_count();
    std::vector<BlockNorm> out;
    out.reserve(static_cast<std::size_t>(count));

    if (params.p == 2.0 && !options.force_physical) {
        std::vector<double> acc(static_cast<std::size_t>(count) + 1, 0.0);
        const auto lower = partition.lower_block();
        const auto weight = partition.lower_weight();
        for (const auto& c : u.components()) {
            const auto s = c.spectral();
            for (std::size_t k = 0; k < s.size(); ++k) {
                const double e = g.multiplicity(k) * std::norm(s[k]);
                if (e == 0.0) continue;
                const auto slot = static_cast<std::size_t>(lower[k] - DyadicPartition::kMinBlock);
                const double a = weight[k];
                acc[slot] += a * a * e;
                acc[slot + 1] += (1.0 - a) * (1.0 - a) * e;
            }
        }
        const double scale = g.cell_volume() / static_cast<double>(g.point_count());
        for (int i = 0; i < count; ++i) {
            const int j = i + DyadicPartition::kMinBlock;
            const double lp = std::sqrt(acc[static_cast<std::size_t>(i)] * scale);
            out.push_back({j, lp, std::exp2(j * params.s) * lp});
        }
        return out;
    }

    for (int j = DyadicPartition::kMinBlock; j <= partition.max_block(); ++j) {
        const double lp = lp_norm(dyadic_block(u, j, partition), params.p);
        out.push_back({j, lp, std::exp2(j * params.s) * lp});
    }
    return out;
}

double aggregate_blocks(std::span<const BlockNorm> blocks, double r) {
    if (std::isinf(r)) {
        double m = 0.0;
        for (const auto& b : blocks) m = std::max(m, b.weighted);
        return m;
    }
    double scale = 0.0;
    for (const auto& b : blocks) scale = std::max(scale, b.weighted);
    if (scale == 0.0) return 0.0;
    double sum = 0.0;
    for (const auto& b : blocks) sum += std::pow(b.weighted / scale, r);
    return scale * std::pow(sum, 1.0 / r);
}

double besov_norm(const VectorField& u, const BesovParams& params, const DyadicPartition& partition,
                  const BesovOptions& options) {
    const auto blocks = block_norms(u, params, partition, options);
    return aggregate_blocks(blocks, params.r);
}

double besov_norm(const ScalarField& u, const BesovParams& params, const DyadicPartition& partition,
                  const BesovOptions& options) {
    return besov_norm(VectorField({u}), params, partition, options);
}

void write_partition_csv(std::ostream& out, double xi_max, int samples) {
    out << "xi,chi,phi\n";
    char buf[96];
    for (int i = 0; i < samples; ++i) {
        const double xi = samples > 1 ? xi_max * i / (samples - 1) : 0.0;
        std::snprintf(buf, sizeof buf, "%.6f,%.17g,%.17g\n", xi, chi(xi), phi(xi));
        out << buf;
    }
}

}  // namespace hdch
