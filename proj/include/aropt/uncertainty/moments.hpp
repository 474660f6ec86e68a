#pragma once

#include <span>
#include <vector>

#include "aropt/poly/monomial.hpp"
#include "aropt/uncertainty/sets.hpp"

namespace aropt::uncertainty {

// Integral of u^beta over the n-dimensional unit ball.
double unit_ball_moment(std::span<const int> beta);

// Lebesgue integral of z^alpha over the ellipsoid.
double ellipsoid_moment(std::span<const int> alpha, const Ellipsoid& E);

// Moments of monomials over variables first .. first+E.dim()-1.
std::vector<double> ellipsoid_moments(const std::vector<poly::Monomial>& monomials, int first,
                                      const Ellipsoid& E);

double ellipsoid_volume(const Ellipsoid& E);

}  // namespace aropt::uncertainty
