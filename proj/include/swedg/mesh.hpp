#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "swedg/operators.hpp"
#include "swedg/state.hpp"

namespace swedg {

enum class BoundaryTag { interior, periodic, wall, outflow };

// Connection of one element side. Sides are numbered 0 west (xi=-1),
// 1 east (xi=+1), 2 south (eta=-1), 3 north (eta=+1). Interior and periodic
// faces store the neighbor; physical boundaries keep neighbor = -1.
struct FaceLink {
    int neighbor = -1;
    int neighbor_side = -1;
    bool reversed = false; // neighbor traverses the shared nodes backwards
    BoundaryTag tag = BoundaryTag::interior;
};

// Index pair of the k-th node along a side in canonical traversal order
// (increasing eta on west/east, increasing xi on south/north).
inline std::array<int, 2> face_node(int side, int k, int N) {
    switch (side) {
    case 0: return {0, k};
    case 1: return {N, k};
    case 2: return {k, 0};
    default: return {k, N};
    }
}

// Reference direction a side cuts through: 0 for west/east, 1 for south/north.
inline int side_axis(int side) { return side < 2 ? 0 : 1; }

// +1 on east/north sides (exterior lies in the positive reference direction),
// -1 on west/south.
inline int side_sign(int side) { return (side == 1 || side == 3) ? +1 : -1; }

// Quadrilateral elements with tensor-product LGL nodes, nodal coordinates and
// metric terms, and face connectivity. Immutable once built.
struct CurvedQuadMesh {
    int N = 0;
    int n_elements = 0;
    SbpOperators ops;

    // Nodal fields, laid out element-major with node index j*(N+1)+i.
    std::vector<double> x, y;
    std::vector<double> jac;
    std::vector<double> ja1_1, ja1_2; // first contravariant metric (y_eta, -x_eta)
    std::vector<double> ja2_1, ja2_2; // second contravariant metric (-y_xi, x_xi)

    std::vector<std::array<FaceLink, 4>> faces;

    int np() const { return N + 1; }
    int nodes_per_element() const { return np() * np(); }
    int nidx(int e, int i, int j) const { return e * nodes_per_element() + j * np() + i; }

    Vec2 metric(int dir, int e, int i, int j) const {
        const int n = nidx(e, i, j);
        return dir == 0 ? Vec2{ja1_1[n], ja1_2[n]} : Vec2{ja2_1[n], ja2_2[n]};
    }
};

// Metric terms of one element from its nodal coordinates (length (N+1)^2
// each, node index j*(N+1)+i). Fails when the Jacobian is not positive.
struct ElementMetrics {
    std::vector<double> jac, ja1_1, ja1_2, ja2_1, ja2_2;
};
ElementMetrics compute_metrics(const SbpOperators& ops, const std::vector<double>& xs,
                               const std::vector<double>& ys);

struct BoundarySpec {
    BoundaryTag left = BoundaryTag::periodic;
    BoundaryTag right = BoundaryTag::periodic;
    BoundaryTag bottom = BoundaryTag::periodic;
    BoundaryTag top = BoundaryTag::periodic;
};

CurvedQuadMesh build_cartesian(double x0, double x1, double y0, double y1, int nx,
                               int ny, int N, const BoundarySpec& bc);

// Interval [x0,x1] as a single row of elements with a unit-height fictitious
// second direction; the second-direction faces close onto themselves so the
// solver has one code path.
CurvedQuadMesh build_interval(double x0, double x1, int nx, int N, BoundaryTag left,
                              BoundaryTag right);

// Push every element through a smooth coordinate mapping, re-approximating the
// geometry with a polynomial of the given degree before interpolating back to
// the solution nodes. Connectivity and tags are kept.
CurvedQuadMesh warp_mesh(const CurvedQuadMesh& mesh,
                         const std::function<Vec2(double, double)>& mapping,
                         int mapping_degree);

// Corner-node description of an unstructured conforming quad mesh, the
// in-memory form of the QUADMESH v1 text format. Curved edges carry their
// shape as coordinates sampled at LGL points along the side's canonical
// direction (endpoints included, matching the corners).
struct QuadMeshSpec {
    struct Element {
        std::array<int, 4> corners{}; // CCW: (-1,-1), (1,-1), (1,1), (-1,1)
        std::array<std::vector<Vec2>, 4> edge_points; // per side; empty = straight
    };
    std::vector<Vec2> nodes;
    std::vector<Element> elements;
    // face id = 4*element + side; unlisted exterior faces default to wall
    std::vector<std::pair<int, BoundaryTag>> boundary;
};

QuadMeshSpec parse_quad_mesh(std::istream& in);
QuadMeshSpec parse_quad_mesh_file(const std::string& path);
void write_quad_mesh(const QuadMeshSpec& spec, std::ostream& out);

// Instantiate the spec at solution degree N: transfinite edge blending,
// metric evaluation, connectivity from shared corner pairs, conformity check.
CurvedQuadMesh assemble_quad_mesh(const QuadMeshSpec& spec, int N);

CurvedQuadMesh read_quad_mesh(const std::string& path, int N);

// Reference coordinates of a physical point, found by Newton iteration over
// the element mappings.
struct LocatedPoint {
    bool found = false;
    int element = -1;
    double xi = 0.0;
    double eta = 0.0;
};
LocatedPoint locate_point(const CurvedQuadMesh& mesh, double px, double py);

// Interpolate an element-major nodal field to a located point.
double sample_field(const CurvedQuadMesh& mesh, const std::vector<double>& field,
                    const LocatedPoint& at);

} // namespace swedg
