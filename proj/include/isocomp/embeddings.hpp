#pragma once

#include <vector>

#include "isocomp/common.hpp"
#include "isocomp/moduli.hpp"

namespace isocomp {

/// The weight sequence of the spherical tree embedding: xi_0 = xi_1 = 0 and
/// xi_{j+1} - xi_j = f(j) j^(-1-1/p) for j >= 1, so that sum (dxi)^p tracks
/// the (C_p) integral of f.
struct XiSequence {
    std::vector<double> xi;  // xi[0..N]
    double p = 2.0;
    bool cpWarning = false;  // set when f failed the (C_p) classifier

    double at(size_t j) const { return j < xi.size() ? xi[j] : xi.back(); }
    size_t size() const { return xi.size(); }
};

XiSequence build_xi(const CompressionModulus& f, double p, int N);

/// Exact compression curve rho(t), integer t in [1, tmax], of a tree map;
/// nondecreasing and bounded by lipschitz * t.
struct CompressionCurve {
    std::vector<double> rho;  // rho[t-1] is rho(t)
    double lipschitz = 0.0;

    double at(int t) const;
    int tmax() const { return static_cast<int>(rho.size()); }
    /// piecewise-linear interpolation between integer samples
    double interp(double t) const;
    /// InvariantError unless nondecreasing and rho(t) <= lipschitz * t.
    void validate() const;
};

/// Distance between images of two tree vertices given (depth x, depth y,
/// depth of the meet), to the p-th power. The image of x places xi_{i+2} on
/// the vertex at distance i along the geodesic from x to the root (the +2
/// shift keeps equal-depth pairs separated and the map Lipschitz).
double tree_pair_distance_p(int depthX, int depthY, int depthMeet, const XiSequence& xi);

/// Exact rho(t), t in [1, 2J], of the spherical embedding of the rooted
/// binary tree of depth J via meet-depth triples (O(J^3) triples, not O(4^J)
/// pairs). J <= 20.
CompressionCurve tree_compression_curve_binary(int J, const XiSequence& xi);

/// Same for an arbitrary rooted tree given as a parent array (parent[root]
/// = -1, vertices in BFS order). <= 10^4 vertices.
CompressionCurve tree_compression_curve_general(const std::vector<int32_t>& parent,
                                                const XiSequence& xi);

/// Trapezoid integral over [1, 2J] of (rho(t)/(Lip t))^q dt/t on the
/// piecewise-linear interpolant of the curve (the 1/Lip rescaling makes the
/// map 1-Lipschitz as the finite-tree obstruction requires). q > 1.
double bourgain_integral(const CompressionCurve& curve, double q, int J, double lipschitz);

/// min over vertex pairs of ||F(x)-F(y)|| / d(x,y) for the binary tree
/// (unrescaled); the obstruction corollary compares it with (I / log J)^(1/q).
double tree_min_ratio_binary(int J, const XiSequence& xi);

}  // namespace isocomp
