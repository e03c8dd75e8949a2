#include "hdch/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <new>
#include <sstream>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hdch/error.hpp"

namespace hdch {

namespace detail {

namespace {

/// Freed blocks of at least 1 MiB, kept for reuse by size (up to 1 GiB total).
struct BlockCache {
    static constexpr std::size_t min_bytes = std::size_t{1} << 20;
    static constexpr std::size_t max_cached_bytes = std::size_t{1} << 30;

    std::mutex mutex;
    std::unordered_map<std::size_t, std::vector<void*>> free_blocks;
    std::size_t cached_bytes = 0;
};

BlockCache& block_cache() {
    static auto* cache = new BlockCache;  // never destroyed: buffers may outlive static teardown
    return *cache;
}

}  // namespace

void* aligned_allocate(std::size_t bytes) {
    if (bytes >= BlockCache::min_bytes) {
        auto& cache = block_cache();
        std::lock_guard lock(cache.mutex);
        auto it = cache.free_blocks.find(bytes);
        if (it != cache.free_blocks.end() && !it->second.empty()) {
            void* p = it->second.back();
            it->second.pop_back();
            cache.cached_bytes -= bytes;
            return p;
        }
    }
    void* p = fftw_malloc(bytes);
    if (p == nullptr) throw std::bad_alloc();
    return p;
}

void aligned_free(void* p, std::size_t bytes) noexcept {
    if (p == nullptr) return;
    if (bytes >= BlockCache::min_bytes) {
        auto& cache = block_cache();
        std::lock_guard lock(cache.mutex);
        if (cache.cached_bytes + bytes <= BlockCache::max_cached_bytes) {
            try {
                cache.free_blocks[bytes].push_back(p);
                cache.cached_bytes += bytes;
                return;
            } catch (...) {
                // Fall through and release the block.
            }
        }
    }
    fftw_free(p);
}

}  // namespace detail

namespace {

// The FFTW planner is not thread-safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

bool is_power_of_two(int n) { return n >= 2 && (n & (n - 1)) == 0; }

}  // namespace

void GridSpec::validate() const {
    std::ostringstream msg;
    if (dimension < 1) {
        msg << "grid dimension must be >= 1 (got " << dimension << ")";
    } else if (!is_power_of_two(points_per_axis)) {
        msg << "points_per_axis must be a power of two >= 2 (got " << points_per_axis << ")";
    } else if (!(side_length > 0.0) || !std::isfinite(side_length)) {
        msg << "side_length must be positive and finite (got " << side_length << ")";
    } else if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0)) {
        msg << "dealias_fraction must lie in (0, 1] (got " << dealias_fraction << ")";
    } else {
        return;
    }
    throw ConfigError(msg.str());
}

GridPtr Grid::create(const GridSpec& spec) {
    spec.validate();
    static std::mutex cache_mutex;
    static std::vector<std::pair<GridSpec, std::weak_ptr<const Grid>>> cache;

    std::lock_guard lock(cache_mutex);
    std::erase_if(cache, [](const auto& entry) { return entry.second.expired(); });
    for (const auto& [key, weak] : cache) {
        if (key == spec) {
            if (auto grid = weak.lock()) return grid;
        }
    }
    GridPtr grid(new Grid(spec));
    cache.emplace_back(spec, grid);
    return grid;
}

Grid::Grid(const GridSpec& spec) : spec_(spec) {
    const int d = spec.dimension;
    const auto n = static_cast<std::size_t>(spec.points_per_axis);
    last_extent_ = n / 2 + 1;
    physical_shape_.assign(static_cast<std::size_t>(d), n);
    spectral_shape_ = physical_shape_;
    spectral_shape_.back() = last_extent_;

    point_count_ = 1;
    spectral_count_ = 1;
    for (int a = 0; a < d; ++a) {
        point_count_ *= physical_shape_[a];
        spectral_count_ *= spectral_shape_[a];
    }
    cell_volume_ = std::pow(spec.spacing(), d);

    const double unit = spec.wavenumber_unit();
    wavenumbers_.resize(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        auto& w = wavenumbers_[a];
        w.resize(spectral_shape_[a]);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = unit * mode_index(i);
    }

    // |xi|^2 and the dealias mask, built by walking the spectral multi-index.
    radius_squared_.assign(spectral_count_, 0.0);
    dealias_keep_.assign(spectral_count_, 1);
    max_mode_.assign(spectral_count_, 0);
    const double keep_limit = spec.dealias_fraction * (static_cast<double>(n) / 2.0);
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    for (std::size_t flat = 0; flat < spectral_count_; ++flat) {
        double r2 = 0.0;
        int top = 0;
        for (int a = 0; a < d; ++a) {
            const double xi = wavenumbers_[a][idx[a]];
            r2 += xi * xi;
            top = std::max(top, std::abs(mode_index(idx[a])));
        }
        const bool keep = top <= keep_limit;
        radius_squared_[flat] = r2;
        max_mode_[flat] = top;
        dealias_keep_[flat] = keep ? 1 : 0;
        for (int a = d - 1; a >= 0; --a) {
            if (++idx[a] < spectral_shape_[a]) break;
            idx[a] = 0;
        }
    }

    std::vector<int> dims(physical_shape_.begin(), physical_shape_.end());
    RealBuffer real_tmp(point_count_);
    ComplexBuffer complex_tmp(spectral_count_);
    std::lock_guard lock(planner_mutex());
    forward_plan_ = fftw_plan_dft_r2c(d, dims.data(), real_tmp.data(),
                                      reinterpret_cast<fftw_complex*>(complex_tmp.data()),
                                      FFTW_ESTIMATE);
    inverse_plan_ = fftw_plan_dft_c2r(d, dims.data(),
                                      reinterpret_cast<fftw_complex*>(complex_tmp.data()),
                                      real_tmp.data(), FFTW_ESTIMATE);
    if (forward_plan_ == nullptr || inverse_plan_ == nullptr) {
        throw Error("failed to create FFT plans");
    }
}

Grid::~Grid() {
    std::lock_guard lock(planner_mutex());
    if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

std::span<const double> Grid::wavenumbers(int axis) const {
    return wavenumbers_.at(static_cast<std::size_t>(axis));
}

int Grid::mode_index(std::size_t index) const {
    const auto n = static_cast<std::size_t>(points_per_axis());
    return index < n / 2 ? static_cast<int>(index) : static_cast<int>(index) - static_cast<int>(n);
}

bool Grid::is_nyquist(std::size_t index) const {
    return index == static_cast<std::size_t>(points_per_axis()) / 2;
}

namespace {

AxisLayout layout_of(const std::vector<std::size_t>& shape, int axis) {
    AxisLayout l{1, shape.at(static_cast<std::size_t>(axis)), 1};
    for (int a = 0; a < axis; ++a) l.outer *= shape[a];
    for (std::size_t a = static_cast<std::size_t>(axis) + 1; a < shape.size(); ++a) l.inner *= shape[a];
    return l;
}

}  // namespace

AxisLayout Grid::spectral_axis(int axis) const { return layout_of(spectral_shape_, axis); }
AxisLayout Grid::physical_axis(int axis) const { return layout_of(physical_shape_, axis); }

void Grid::forward(std::span<const double> values, std::span<Complex> spectral) const {
    if (values.size() != point_count_ || spectral.size() != spectral_count_) {
        throw std::invalid_argument("forward transform: array size does not match grid");
    }
    // r2c leaves its input intact, so the const_cast never writes.
    fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(values.data()),
                         reinterpret_cast<fftw_complex*>(spectral.data()));
}

void Grid::inverse(std::span<const Complex> spectral, std::span<double> values) const {
    if (values.size() != point_count_ || spectral.size() != spectral_count_) {
        throw std::invalid_argument("inverse transform: array size does not match grid");
    }
    // Multi-dimensional c2r destroys its input.
    ComplexBuffer scratch = ComplexBuffer::copy_of(spectral);
    fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                         reinterpret_cast<fftw_complex*>(scratch.data()), values.data());
    const double scale = 1.0 / static_cast<double>(point_count_);
    for (double& v : values) v *= scale;
}

}  // namespace hdch
