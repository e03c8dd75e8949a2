#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "hdch/field.hpp"

namespace hdch {

/// C-infinity step: 0 for t <= 0, 1 for t >= 1, built from exp(-1/t).
double smooth_step(double t);
/// Radial low-pass cutoff: 1 for r <= 1, 0 for r >= 4/3.
double chi(double r);
/// Radial ring cutoff chi(r/2) - chi(r), supported in 1 <= r <= 8/3.
double phi(double r);

/// Index triple of B^s_{p,r}. p and r may be infinity.
struct BesovParams {
    double s = 0.0;
    double p = 2.0;
    double r = 2.0;

    /// Throws ConfigError unless p, r lie in [1, inf].
    void validate() const;
};

/// Littlewood-Paley blocks sampled on a grid's frequency lattice.
///
/// Block -1 uses chi(xi); block j >= 0 uses phi(2^-j xi). Every lattice point
/// lies in at most two adjacent blocks whose weights sum to one, so the table
/// stores the lower block index and its weight per coefficient.
class DyadicPartition {
public:
    static constexpr int kMinBlock = -1;

    explicit DyadicPartition(GridPtr grid);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    /// Smallest J with 2^(J+1) >= the largest |xi| on the lattice.
    int max_block() const { return max_block_; }
    int block_count() const { return max_block_ - kMinBlock + 1; }

    /// Weight of block j at spectral position `flat` (0 for j outside the lattice range).
    double weight(std::size_t flat, int j) const {
        const int lo = lower_[flat];
        if (j == lo) return lower_weight_[flat];
        if (j == lo + 1) return 1.0 - lower_weight_[flat];
        return 0.0;
    }
    /// Multiplier table of block j, indexed like Grid::radius_squared().
    std::vector<double> block_multiplier(int j) const;
    /// Multiplier of S_j = sum of blocks j' < j.
    std::vector<double> low_pass_multiplier(int j) const;

    std::span<const std::int8_t> lower_block() const { return lower_; }
    std::span<const double> lower_weight() const { return lower_weight_; }

private:
    GridPtr grid_;
    int max_block_ = 0;
    std::vector<std::int8_t> lower_;
    std::vector<double> lower_weight_;
};

using DyadicPartitionPtr = std::shared_ptr<const DyadicPartition>;
DyadicPartitionPtr build_partition(GridPtr grid);

/// Delta_j u; zero for j <= -2.
ScalarField dyadic_block(const ScalarField& u, int j, const DyadicPartition& partition);
VectorField dyadic_block(const VectorField& u, int j, const DyadicPartition& partition);
/// S_j u = sum over j' < j of Delta_j' u.
ScalarField low_freq_cutoff(const ScalarField& u, int j, const DyadicPartition& partition);
VectorField low_freq_cutoff(const VectorField& u, int j, const DyadicPartition& partition);

struct BesovOptions {
    /// Reject fields whose energy above the dealias cutoff exceeds this fraction.
    double resolution_tolerance = 1e-10;
    bool check_resolution = true;
    /// For p = 2 the block norms come from the spectrum unless this is set.
    bool force_physical = false;
};

struct BlockNorm {
    int j;
    double lp;        ///< ||Delta_j u||_{L^p}
    double weighted;  ///< 2^{js} ||Delta_j u||_{L^p}
};

/// Block norms for j = -1 .. max_block.
std::vector<BlockNorm> block_norms(const VectorField& u, const BesovParams& params,
                                   const DyadicPartition& partition, const BesovOptions& options = {});
double besov_norm(const VectorField& u, const BesovParams& params, const DyadicPartition& partition,
                  const BesovOptions& options = {});
double besov_norm(const ScalarField& u, const BesovParams& params, const DyadicPartition& partition,
                  const BesovOptions& options = {});

/// l^r norm of the weighted block sequence.
double aggregate_blocks(std::span<const BlockNorm> blocks, double r);

/// Writes "xi,chi,phi" rows for xi in [0, xi_max] with `samples` points.
void write_partition_csv(std::ostream& out, double xi_max = 3.0, int samples = 301);

}  // namespace hdch
