#pragma once

#include <string>
#include <vector>

#include "countdist/linalg.hpp"
#include "countdist/rational.hpp"
#include "countdist/types.hpp"

namespace countdist {

enum class PolytopeKind { kF, kU, kRF, kRU };

PolytopeKind polytope_kind_from_name(const std::string& name);
std::string polytope_kind_name(PolytopeKind kind);

/// Exact description of one of the four polytopes. z is required for F / RF
/// and ignored for U / RU. All arithmetic in this module is rational.
struct PolytopeDescriptor {
    PolytopeKind kind = PolytopeKind::kF;
    int n = 0;
    Rational lambda = Rational(2);
    Distribution<Rational> z;
};

struct VertexSet {
    std::vector<Mat<Rational>> vertices;  // n x n for F/U, k x n for RF/RU
};

/// Exhaustive, exact enumeration of extreme points.
///
/// RF/RU walk candidate supports up to the support-count bounds (at most
/// |P|+n-1 positive entries for RF; at most one per row and n total for RU),
/// solve the equality system on each support, and keep unique strictly
/// positive solutions, each verified against the simplification predicate.
/// F/U map the representation vertices through Psi, dedupe, and keep images
/// that pass the exact extremeness rank test.
///
/// Capacity guards: n <= 3 for RF/RU, n <= 4 for F/U.
VertexSet enumerate_vertices(const PolytopeDescriptor& desc);

/// Unpruned variants used to validate that the support pruning loses nothing
/// (every cell subset is tried). Exponential; intended for n <= 3.
VertexSet enumerate_representation_unpruned(const PolytopeDescriptor& desc);

/// Independent cross-check: vertex enumeration of F or U directly in the
/// n^2-dimensional matrix space by solving every full-rank subset of binding
/// constraints. Intended for n <= 3.
VertexSet direct_enumerate_matrix_polytope(const PolytopeDescriptor& desc);

struct RepresentationReport {
    bool every_extreme_covered = false;   // each ex(P) point is Psi B for some enumerated B
    bool some_representation_drops = false;  // some ex(R_P) maps to a non-extreme point
    bool some_collision = false;          // two distinct ex(R_P) share one extreme image
    int num_representation_vertices = 0;
    int num_images = 0;
    int num_extreme = 0;
    std::string detail;
};

/// Structural checks tying the representation polytope to its image polytope.
/// Throws InternalError with a counterexample dump when an assertion fails.
RepresentationReport verify_representation_theorems(const PolytopeDescriptor& desc);

}  // namespace countdist
