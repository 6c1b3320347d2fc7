#include "fracjac/measures.hpp"

#include <cmath>
#include <vector>

#include "fracjac/errors.hpp"
#include "fracjac/parallel.hpp"

namespace fracjac {

int AtomicMeasure::total_sign() const
{
    int s = 0;
    for (const auto& a : atoms) s += a.sign;
    return s;
}

std::size_t AtomicMeasure::positives() const
{
    std::size_t c = 0;
    for (const auto& a : atoms) c += a.sign > 0;
    return c;
}

std::size_t AtomicMeasure::negatives() const
{
    return atoms.size() - positives();
}

AtomicMeasure atomic_from_regular_value(const DegreeSolver& solver, const Vec& a)
{
    const DegreeReport r = solver.preimage(a);
    AtomicMeasure mu;
    mu.scale = unit_ball_volume(solver.domain().dimension());
    for (const auto& p : r.preimages) mu.atoms.push_back({p.x, p.det > 0 ? 1 : -1});
    return mu;
}

AtomicMeasure atomic_from_regular_value(const VectorField& u, const Domain& omega, const Vec& a)
{
    return atomic_from_regular_value(DegreeSolver(u, omega, 1), a);
}

double pair_atomic(const AtomicMeasure& mu, const TestFunction& psi)
{
    std::vector<double> terms;
    terms.reserve(mu.atoms.size());
    for (const auto& a : mu.atoms) terms.push_back(a.sign * psi.value(a.x));
    return mu.scale * pairwise_sum(terms);
}

AtomicMeasure difference(const AtomicMeasure& mu, const AtomicMeasure& nu)
{
    if (!mu.empty() && !nu.empty() && std::abs(mu.scale - nu.scale) > 1e-15 * std::abs(mu.scale))
        throw InvalidParameter("atomic measures with different scales");
    AtomicMeasure d;
    d.scale = mu.empty() ? nu.scale : mu.scale;
    d.atoms = mu.atoms;
    for (const auto& a : nu.atoms) d.atoms.push_back({a.x, -a.sign});
    return d;
}

}  // namespace fracjac
