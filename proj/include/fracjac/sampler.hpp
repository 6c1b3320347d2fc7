#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "fracjac/domain.hpp"
#include "fracjac/field.hpp"
#include "fracjac/test_function.hpp"

namespace fracjac {

/// Uniform samples from an axis-aligned box, drawn sequentially from a
/// seeded mt19937_64 so that a seed fixes the sample sequence exactly.
class BoxSampler {
public:
    BoxSampler(Vec lower, Vec upper, std::uint64_t seed);

    Vec next();
    std::vector<Vec> draw(std::size_t count);
    double volume() const;
    const Vec& lower() const { return lower_; }
    const Vec& upper() const { return upper_; }

private:
    Vec lower_, upper_;
    std::mt19937_64 rng_;
};

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
double unit_uniform(std::mt19937_64& rng);

/// Bounding box of u over the interior and boundary nodes lying in the
/// support ball of psi (the whole domain for psi = 0), inflated on every
/// side by `margin` times its diameter.
void support_image_box(const VectorField& u, const TestFunction& psi, const Domain& omega, double margin, Vec& lower,
                       Vec& upper);

/// Mean and standard error of the mean.
struct SampleStats {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t count = 0;
};
SampleStats sample_stats(const std::vector<double>& values);

}  // namespace fracjac
