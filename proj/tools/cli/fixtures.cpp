#include "fixtures.hpp"

#include <cmath>
#include <random>

#include "hdch/error.hpp"

namespace hdch::cli {

namespace {

struct Mode {
    std::vector<int> k;
    double a;
    double b;
};

}  // namespace

VectorField trig_fixture(const GridPtr& grid, std::uint64_t seed, int max_mode, double amplitude) {
    const int d = grid->dimension();
    const double unit = grid->spec().wavenumber_unit();
    if (max_mode < 1 || max_mode * unit > grid->spec().dealias_cutoff()) {
        throw ConfigError("fixture max_mode " + std::to_string(max_mode) + " must be >= 1 and under the dealias cutoff");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<ScalarField> components;
    for (int i = 0; i < d; ++i) {
        std::vector<Mode> modes;
        double total = 0.0;
        std::vector<int> k(static_cast<std::size_t>(d), -max_mode);
        for (;;) {
            double k2 = 0.0;
            for (int x : k) k2 += x * x;
            const double damp = std::exp(-k2 / (max_mode * max_mode));
            Mode m{k, damp * normal(rng), damp * normal(rng)};
            total += std::abs(m.a) + std::abs(m.b);
            modes.push_back(std::move(m));
            int axis = d - 1;
            while (axis >= 0 && k[static_cast<std::size_t>(axis)] == max_mode) k[static_cast<std::size_t>(axis--)] = -max_mode;
            if (axis < 0) break;
            ++k[static_cast<std::size_t>(axis)];
        }
        const double scale = amplitude / total;
        components.push_back(ScalarField::sample(grid, [&](std::span<const double> x) {
            double sum = 0.0;
            for (const auto& m : modes) {
                double theta = 0.0;
                for (int a = 0; a < d; ++a) theta += m.k[static_cast<std::size_t>(a)] * unit * x[static_cast<std::size_t>(a)];
                sum += m.a * std::cos(theta) + m.b * std::sin(theta);
            }
            return scale * sum;
        }));
    }
    return dealias(VectorField(std::move(components)));
}

VectorField sine_fixture(const GridPtr& grid, double amplitude) {
    std::vector<ScalarField> c{ScalarField::sample(grid, [&](std::span<const double> x) { return amplitude * std::sin(x[0]); })};
    for (int i = 1; i < grid->dimension(); ++i) c.push_back(ScalarField::zeros(grid));
    return VectorField(std::move(c));
}

}  // namespace hdch::cli
