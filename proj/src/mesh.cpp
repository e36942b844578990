#include "swedg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace swedg {

namespace {

int opposite(int side) {
    switch (side) {
    case 0: return 1;
    case 1: return 0;
    case 2: return 3;
    default: return 2;
    }
}

// Corner slots delimiting a side, in canonical traversal order.
std::array<int, 2> side_corners(int side) {
    switch (side) {
    case 0: return {0, 3};
    case 1: return {1, 2};
    case 2: return {0, 1};
    default: return {3, 2};
    }
}

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

// Interpolant of one element's nodal field at a reference point, evaluated
// one direction at a time.
double eval2d(const SbpOperators& ops, const double* elem_field, double xi, double eta) {
    const int np = ops.N + 1;
    std::vector<double> rows(np);
    for (int j = 0; j < np; ++j) {
        rows[j] = interpolate(ops, elem_field + j * np, xi);
    }
    return interpolate(ops, rows.data(), eta);
}

std::vector<double> axis_derivative(const SbpOperators& ops, const std::vector<double>& f,
                                    int axis) {
    const int np = ops.N + 1;
    std::vector<double> out(np * np, 0.0);
    for (int j = 0; j < np; ++j) {
        for (int i = 0; i < np; ++i) {
            double acc = 0.0;
            for (int m = 0; m < np; ++m) {
                acc += axis == 0 ? ops.d(i, m) * f[j * np + m] : ops.d(j, m) * f[m * np + i];
            }
            out[j * np + i] = acc;
        }
    }
    return out;
}

void install_element(CurvedQuadMesh& mesh, int e, const std::vector<double>& xs,
                     const std::vector<double>& ys) {
    ElementMetrics m;
    try {
        m = compute_metrics(mesh.ops, xs, ys);
    } catch (const std::exception& err) {
        fail("element " + std::to_string(e) + ": " + err.what());
    }
    const int npe = mesh.nodes_per_element();
    std::copy(xs.begin(), xs.end(), mesh.x.begin() + e * npe);
    std::copy(ys.begin(), ys.end(), mesh.y.begin() + e * npe);
    std::copy(m.jac.begin(), m.jac.end(), mesh.jac.begin() + e * npe);
    std::copy(m.ja1_1.begin(), m.ja1_1.end(), mesh.ja1_1.begin() + e * npe);
    std::copy(m.ja1_2.begin(), m.ja1_2.end(), mesh.ja1_2.begin() + e * npe);
    std::copy(m.ja2_1.begin(), m.ja2_1.end(), mesh.ja2_1.begin() + e * npe);
    std::copy(m.ja2_2.begin(), m.ja2_2.end(), mesh.ja2_2.begin() + e * npe);
}

void allocate_fields(CurvedQuadMesh& mesh) {
    const std::size_t n = static_cast<std::size_t>(mesh.n_elements) * mesh.nodes_per_element();
    mesh.x.assign(n, 0.0);
    mesh.y.assign(n, 0.0);
    mesh.jac.assign(n, 0.0);
    mesh.ja1_1.assign(n, 0.0);
    mesh.ja1_2.assign(n, 0.0);
    mesh.ja2_1.assign(n, 0.0);
    mesh.ja2_2.assign(n, 0.0);
    mesh.faces.assign(mesh.n_elements, {});
}

} // namespace

ElementMetrics compute_metrics(const SbpOperators& ops, const std::vector<double>& xs,
                               const std::vector<double>& ys) {
    const int np = ops.N + 1;
    const auto x_xi = axis_derivative(ops, xs, 0);
    const auto x_eta = axis_derivative(ops, xs, 1);
    const auto y_xi = axis_derivative(ops, ys, 0);
    const auto y_eta = axis_derivative(ops, ys, 1);

    ElementMetrics m;
    m.jac.resize(np * np);
    m.ja1_1.resize(np * np);
    m.ja1_2.resize(np * np);
    m.ja2_1.resize(np * np);
    m.ja2_2.resize(np * np);
    for (int n = 0; n < np * np; ++n) {
        m.ja1_1[n] = y_eta[n];
        m.ja1_2[n] = -x_eta[n];
        m.ja2_1[n] = -y_xi[n];
        m.ja2_2[n] = x_xi[n];
        m.jac[n] = x_xi[n] * y_eta[n] - x_eta[n] * y_xi[n];
        if (!(m.jac[n] > 0.0)) {
            fail("nonpositive Jacobian " + std::to_string(m.jac[n]) + " at node (" +
                 std::to_string(n % np) + "," + std::to_string(n / np) + ")");
        }
    }
    return m;
}

CurvedQuadMesh build_cartesian(double x0, double x1, double y0, double y1, int nx,
                               int ny, int N, const BoundarySpec& bc) {
    if (!(x1 > x0) || !(y1 > y0)) {
        fail("degenerate domain");
    }
    if (nx < 1 || ny < 1 || N < 1) {
        fail("need nx, ny >= 1 and N >= 1");
    }
    if ((bc.left == BoundaryTag::periodic) != (bc.right == BoundaryTag::periodic) ||
        (bc.bottom == BoundaryTag::periodic) != (bc.top == BoundaryTag::periodic)) {
        fail("periodic boundaries must come in opposite pairs");
    }

    CurvedQuadMesh mesh;
    mesh.N = N;
    mesh.ops = build_lgl_operators(N);
    mesh.n_elements = nx * ny;
    allocate_fields(mesh);

    const double dx = (x1 - x0) / nx;
    const double dy = (y1 - y0) / ny;
    const int np = N + 1;
    std::vector<double> xs(np * np), ys(np * np);
    for (int ey = 0; ey < ny; ++ey) {
        for (int ex = 0; ex < nx; ++ex) {
            const int e = ey * nx + ex;
            for (int j = 0; j < np; ++j) {
                for (int i = 0; i < np; ++i) {
                    xs[j * np + i] = x0 + dx * (ex + 0.5 * (mesh.ops.nodes[i] + 1.0));
                    ys[j * np + i] = y0 + dy * (ey + 0.5 * (mesh.ops.nodes[j] + 1.0));
                }
            }
            install_element(mesh, e, xs, ys);

            const auto link = [&](int side, int nex, int ney, BoundaryTag edge_tag) {
                FaceLink& f = mesh.faces[e][side];
                const bool outside = nex < 0 || nex >= nx || ney < 0 || ney >= ny;
                if (!outside) {
                    f = {ney * nx + nex, opposite(side), false, BoundaryTag::interior};
                } else if (edge_tag == BoundaryTag::periodic) {
                    f = {((ney + ny) % ny) * nx + (nex + nx) % nx, opposite(side), false,
                         BoundaryTag::periodic};
                } else {
                    f = {-1, -1, false, edge_tag};
                }
            };
            link(0, ex - 1, ey, bc.left);
            link(1, ex + 1, ey, bc.right);
            link(2, ex, ey - 1, bc.bottom);
            link(3, ex, ey + 1, bc.top);
        }
    }
    return mesh;
}

CurvedQuadMesh build_interval(double x0, double x1, int nx, int N, BoundaryTag left,
                              BoundaryTag right) {
    BoundarySpec bc;
    bc.left = left;
    bc.right = right;
    bc.bottom = BoundaryTag::periodic;
    bc.top = BoundaryTag::periodic;
    return build_cartesian(x0, x1, -1.0, 1.0, nx, 1, N, bc);
}

CurvedQuadMesh warp_mesh(const CurvedQuadMesh& mesh,
                         const std::function<Vec2(double, double)>& mapping,
                         int mapping_degree) {
    if (mapping_degree < 1) {
        fail("mapping degree must be at least 1");
    }
    const SbpOperators gops = build_lgl_operators(mapping_degree);
    const std::vector<double> T = interpolation_matrix(gops, mesh.ops.nodes);

    CurvedQuadMesh out = mesh;
    const int np = mesh.np();
    const int gp = mapping_degree + 1;
    const int npe = mesh.nodes_per_element();
    std::vector<double> gx(gp * gp), gy(gp * gp), xs(np * np), ys(np * np);
    for (int e = 0; e < mesh.n_elements; ++e) {
        for (int j = 0; j < gp; ++j) {
            for (int i = 0; i < gp; ++i) {
                const double px =
                    eval2d(mesh.ops, mesh.x.data() + e * npe, gops.nodes[i], gops.nodes[j]);
                const double py =
                    eval2d(mesh.ops, mesh.y.data() + e * npe, gops.nodes[i], gops.nodes[j]);
                const Vec2 q = mapping(px, py);
                gx[j * gp + i] = q.x1;
                gy[j * gp + i] = q.x2;
            }
        }
        for (int j = 0; j < np; ++j) {
            for (int i = 0; i < np; ++i) {
                double ax = 0.0;
                double ay = 0.0;
                for (int b = 0; b < gp; ++b) {
                    for (int a = 0; a < gp; ++a) {
                        const double w = T[i * gp + a] * T[j * gp + b];
                        ax += w * gx[b * gp + a];
                        ay += w * gy[b * gp + a];
                    }
                }
                xs[j * np + i] = ax;
                ys[j * np + i] = ay;
            }
        }
        install_element(out, e, xs, ys);
    }
    return out;
}

namespace {

struct LineReader {
    std::istream& in;
    int line_no = 0;

    bool next(std::istringstream& out) {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            const auto pos = line.find_first_not_of(" \t\r");
            if (pos == std::string::npos || line[pos] == '#') {
                continue;
            }
            out = std::istringstream(line);
            return true;
        }
        return false;
    }

    [[noreturn]] void fail_here(const std::string& msg) {
        fail("line " + std::to_string(line_no) + ": " + msg);
    }
};

BoundaryTag parse_tag(const std::string& word) {
    if (word == "wall" || word == "slip-wall") {
        return BoundaryTag::wall;
    }
    if (word == "outflow") {
        return BoundaryTag::outflow;
    }
    fail("unknown boundary tag '" + word + "'");
}

} // namespace

QuadMeshSpec parse_quad_mesh(std::istream& in) {
    LineReader rd{in};
    std::istringstream ls;

    if (!rd.next(ls)) {
        fail("empty mesh file");
    }
    std::string word, version;
    ls >> word >> version;
    if (word != "QUADMESH" || version != "v1") {
        rd.fail_here("expected header 'QUADMESH v1'");
    }

    QuadMeshSpec spec;
    int n_nodes = 0;
    if (!rd.next(ls) || !(ls >> word >> n_nodes) || word != "nodes" || n_nodes < 4) {
        rd.fail_here("expected 'nodes <count>' with count >= 4");
    }
    spec.nodes.resize(n_nodes);
    for (int k = 0; k < n_nodes; ++k) {
        if (!rd.next(ls) || !(ls >> spec.nodes[k].x1 >> spec.nodes[k].x2)) {
            rd.fail_here("expected node coordinates 'x y'");
        }
    }

    int n_elems = 0;
    if (!rd.next(ls) || !(ls >> word >> n_elems) || word != "elements" || n_elems < 1) {
        rd.fail_here("expected 'elements <count>' with count >= 1");
    }
    spec.elements.resize(n_elems);
    std::map<std::array<int, 4>, int> seen;
    for (int e = 0; e < n_elems; ++e) {
        auto& el = spec.elements[e];
        if (!rd.next(ls)) {
            rd.fail_here("expected element line");
        }
        for (int c = 0; c < 4; ++c) {
            if (!(ls >> el.corners[c]) || el.corners[c] < 0 || el.corners[c] >= n_nodes) {
                rd.fail_here("bad corner id in element " + std::to_string(e));
            }
        }
        std::array<int, 4> key = el.corners;
        std::sort(key.begin(), key.end());
        if (key[0] == key[1] || key[1] == key[2] || key[2] == key[3]) {
            rd.fail_here("element " + std::to_string(e) + " repeats a corner");
        }
        if (!seen.emplace(key, e).second) {
            rd.fail_here("element " + std::to_string(e) + " duplicates element " +
                         std::to_string(seen[key]));
        }
        while (ls >> word) {
            int side = -1;
            int npts = 0;
            if (word != "curve" || !(ls >> side >> npts) || side < 0 || side > 3 ||
                npts < 2) {
                rd.fail_here("expected 'curve <side 0..3> <npts>=2>' block");
            }
            auto& pts = el.edge_points[side];
            if (!pts.empty()) {
                rd.fail_here("element " + std::to_string(e) + " has two curves on side " +
                             std::to_string(side));
            }
            pts.resize(npts);
            for (int k = 0; k < npts; ++k) {
                if (!(ls >> pts[k].x1 >> pts[k].x2)) {
                    rd.fail_here("curve block needs " + std::to_string(npts) +
                                 " coordinate pairs");
                }
            }
        }
    }

    int n_bc = 0;
    if (!rd.next(ls) || !(ls >> word >> n_bc) || word != "boundary" || n_bc < 0) {
        rd.fail_here("expected 'boundary <count>'");
    }
    for (int k = 0; k < n_bc; ++k) {
        int face_id = -1;
        if (!rd.next(ls) || !(ls >> face_id >> word)) {
            rd.fail_here("expected boundary line '<face-id> <tag>'");
        }
        if (face_id < 0 || face_id >= 4 * n_elems) {
            rd.fail_here("face id " + std::to_string(face_id) + " out of range");
        }
        try {
            spec.boundary.emplace_back(face_id, parse_tag(word));
        } catch (const std::exception& err) {
            rd.fail_here(err.what());
        }
    }
    return spec;
}

QuadMeshSpec parse_quad_mesh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        fail("cannot open mesh file '" + path + "'");
    }
    try {
        return parse_quad_mesh(in);
    } catch (const std::exception& err) {
        fail(path + ": " + err.what());
    }
}

void write_quad_mesh(const QuadMeshSpec& spec, std::ostream& out) {
    out.precision(17);
    out << "QUADMESH v1\n";
    out << "nodes " << spec.nodes.size() << "\n";
    for (const Vec2& n : spec.nodes) {
        out << n.x1 << " " << n.x2 << "\n";
    }
    out << "elements " << spec.elements.size() << "\n";
    for (const auto& el : spec.elements) {
        out << el.corners[0] << " " << el.corners[1] << " " << el.corners[2] << " "
            << el.corners[3];
        for (int side = 0; side < 4; ++side) {
            const auto& pts = el.edge_points[side];
            if (pts.empty()) {
                continue;
            }
            out << " curve " << side << " " << pts.size();
            for (const Vec2& q : pts) {
                out << " " << q.x1 << " " << q.x2;
            }
        }
        out << "\n";
    }
    out << "boundary " << spec.boundary.size() << "\n";
    for (const auto& [face_id, tag] : spec.boundary) {
        out << face_id << " " << (tag == BoundaryTag::outflow ? "outflow" : "wall")
            << "\n";
    }
}

CurvedQuadMesh assemble_quad_mesh(const QuadMeshSpec& spec, int N) {
    CurvedQuadMesh mesh;
    mesh.N = N;
    mesh.ops = build_lgl_operators(N);
    mesh.n_elements = static_cast<int>(spec.elements.size());
    allocate_fields(mesh);

    double scale = 1.0;
    for (const Vec2& n : spec.nodes) {
        scale = std::max({scale, std::abs(n.x1), std::abs(n.x2)});
    }

    // Geometry: transfinite blend of the four edge curves.
    const int np = N + 1;
    std::vector<double> xs(np * np), ys(np * np);
    for (int e = 0; e < mesh.n_elements; ++e) {
        const auto& el = spec.elements[e];
        std::array<Vec2, 4> corner;
        for (int c = 0; c < 4; ++c) {
            corner[c] = spec.nodes[el.corners[c]];
        }

        std::array<std::vector<Vec2>, 4> edge;
        for (int side = 0; side < 4; ++side) {
            const auto [ca, cb] = side_corners(side);
            edge[side].resize(np);
            const auto& pts = el.edge_points[side];
            if (pts.empty()) {
                for (int k = 0; k < np; ++k) {
                    const double t = mesh.ops.nodes[k];
                    edge[side][k] = 0.5 * (1.0 - t) * corner[ca] + 0.5 * (1.0 + t) * corner[cb];
                }
            } else {
                if (norm(pts.front() - corner[ca]) > 1e-9 * scale ||
                    norm(pts.back() - corner[cb]) > 1e-9 * scale) {
                    fail("element " + std::to_string(e) + " side " + std::to_string(side) +
                         ": curve endpoints do not match the corners");
                }
                const SbpOperators gops = build_lgl_operators(static_cast<int>(pts.size()) - 1);
                const std::vector<double> T = interpolation_matrix(gops, mesh.ops.nodes);
                const int gp = gops.np();
                for (int k = 0; k < np; ++k) {
                    Vec2 acc{0.0, 0.0};
                    for (int m = 0; m < gp; ++m) {
                        acc = acc + T[k * gp + m] * pts[m];
                    }
                    edge[side][k] = acc;
                }
            }
        }

        for (int j = 0; j < np; ++j) {
            const double eta = mesh.ops.nodes[j];
            for (int i = 0; i < np; ++i) {
                const double xi = mesh.ops.nodes[i];
                Vec2 p = 0.5 * (1.0 - eta) * edge[2][i] + 0.5 * (1.0 + eta) * edge[3][i] +
                         0.5 * (1.0 - xi) * edge[0][j] + 0.5 * (1.0 + xi) * edge[1][j];
                const Vec2 bilin =
                    0.25 * ((1.0 - xi) * (1.0 - eta) * corner[0] +
                            (1.0 + xi) * (1.0 - eta) * corner[1] +
                            (1.0 + xi) * (1.0 + eta) * corner[2] +
                            (1.0 - xi) * (1.0 + eta) * corner[3]);
                p = p - bilin;
                xs[j * np + i] = p.x1;
                ys[j * np + i] = p.x2;
            }
        }
        install_element(mesh, e, xs, ys);
    }

    // Connectivity from shared corner pairs.
    std::map<std::pair<int, int>, std::vector<std::array<int, 4>>> by_edge;
    for (int e = 0; e < mesh.n_elements; ++e) {
        for (int side = 0; side < 4; ++side) {
            const auto [ca, cb] = side_corners(side);
            const int a = spec.elements[e].corners[ca];
            const int b = spec.elements[e].corners[cb];
            by_edge[{std::min(a, b), std::max(a, b)}].push_back({e, side, a, b});
        }
    }
    for (const auto& [key, owners] : by_edge) {
        if (owners.size() > 2) {
            fail("edge between nodes " + std::to_string(key.first) + " and " +
                 std::to_string(key.second) + " is shared by " +
                 std::to_string(owners.size()) + " elements");
        }
        if (owners.size() == 2) {
            const auto& [e0, s0, a0, b0] = owners[0];
            const auto& [e1, s1, a1, b1] = owners[1];
            const bool reversed = a0 != a1;
            mesh.faces[e0][s0] = {e1, s1, reversed, BoundaryTag::interior};
            mesh.faces[e1][s1] = {e0, s0, reversed, BoundaryTag::interior};
        }
    }

    // Boundary tags; unlisted exterior faces default to walls.
    for (auto& per_element : mesh.faces) {
        for (auto& f : per_element) {
            if (f.neighbor < 0) {
                f.tag = BoundaryTag::wall;
            }
        }
    }
    for (const auto& [face_id, tag] : spec.boundary) {
        FaceLink& f = mesh.faces[face_id / 4][face_id % 4];
        if (f.neighbor >= 0) {
            fail("boundary tag given for interior face " + std::to_string(face_id));
        }
        f.tag = tag;
    }

    // Conformity: shared nodal coordinates must agree across every face.
    for (int e = 0; e < mesh.n_elements; ++e) {
        for (int side = 0; side < 4; ++side) {
            const FaceLink& f = mesh.faces[e][side];
            if (f.neighbor < e) {
                continue;
            }
            for (int k = 0; k < np; ++k) {
                const auto [i, j] = face_node(side, k, N);
                const auto [ni, nj] =
                    face_node(f.neighbor_side, f.reversed ? N - k : k, N);
                const double ddx =
                    mesh.x[mesh.nidx(e, i, j)] - mesh.x[mesh.nidx(f.neighbor, ni, nj)];
                const double ddy =
                    mesh.y[mesh.nidx(e, i, j)] - mesh.y[mesh.nidx(f.neighbor, ni, nj)];
                if (std::abs(ddx) > 1e-12 * scale || std::abs(ddy) > 1e-12 * scale) {
                    fail("face between elements " + std::to_string(e) + " and " +
                         std::to_string(f.neighbor) + " is not conforming");
                }
            }
        }
    }
    return mesh;
}

CurvedQuadMesh read_quad_mesh(const std::string& path, int N) {
    const QuadMeshSpec spec = parse_quad_mesh_file(path);
    try {
        return assemble_quad_mesh(spec, N);
    } catch (const std::exception& err) {
        fail(path + ": " + err.what());
    }
}

LocatedPoint locate_point(const CurvedQuadMesh& mesh, double px, double py) {
    const int np = mesh.np();
    const int npe = mesh.nodes_per_element();
    const double tol = 1e-12 * (1.0 + std::abs(px) + std::abs(py));

    const auto try_element = [&](int e, LocatedPoint& hit) {
        const double* ex = mesh.x.data() + e * npe;
        const double* ey = mesh.y.data() + e * npe;

        std::vector<double> exv(ex, ex + npe), eyv(ey, ey + npe);
        const auto x_xi = axis_derivative(mesh.ops, exv, 0);
        const auto x_eta = axis_derivative(mesh.ops, exv, 1);
        const auto y_xi = axis_derivative(mesh.ops, eyv, 0);
        const auto y_eta = axis_derivative(mesh.ops, eyv, 1);

        double xi = 0.0;
        double eta = 0.0;
        for (int it = 0; it < 50; ++it) {
            const double fx = eval2d(mesh.ops, ex, xi, eta) - px;
            const double fy = eval2d(mesh.ops, ey, xi, eta) - py;
            if (std::abs(fx) + std::abs(fy) <= tol) {
                if (std::abs(xi) <= 1.0 + 1e-9 && std::abs(eta) <= 1.0 + 1e-9) {
                    hit.found = true;
                    hit.element = e;
                    hit.xi = std::clamp(xi, -1.0, 1.0);
                    hit.eta = std::clamp(eta, -1.0, 1.0);
                    return true;
                }
                return false;
            }
            const double a = eval2d(mesh.ops, x_xi.data(), xi, eta);
            const double b = eval2d(mesh.ops, x_eta.data(), xi, eta);
            const double c = eval2d(mesh.ops, y_xi.data(), xi, eta);
            const double d = eval2d(mesh.ops, y_eta.data(), xi, eta);
            const double det = a * d - b * c;
            if (det == 0.0) {
                return false;
            }
            xi = std::clamp(xi - (d * fx - b * fy) / det, -1.2, 1.2);
            eta = std::clamp(eta - (-c * fx + a * fy) / det, -1.2, 1.2);
        }
        return false;
    };

    LocatedPoint hit;
    for (int pass = 0; pass < 2; ++pass) {
        for (int e = 0; e < mesh.n_elements; ++e) {
            if (pass == 0) {
                double lo_x = mesh.x[e * npe], hi_x = lo_x;
                double lo_y = mesh.y[e * npe], hi_y = lo_y;
                for (int n = 1; n < npe; ++n) {
                    lo_x = std::min(lo_x, mesh.x[e * npe + n]);
                    hi_x = std::max(hi_x, mesh.x[e * npe + n]);
                    lo_y = std::min(lo_y, mesh.y[e * npe + n]);
                    hi_y = std::max(hi_y, mesh.y[e * npe + n]);
                }
                const double pad = 0.25 * std::max(hi_x - lo_x, hi_y - lo_y);
                if (px < lo_x - pad || px > hi_x + pad || py < lo_y - pad ||
                    py > hi_y + pad) {
                    continue;
                }
            }
            if (try_element(e, hit)) {
                return hit;
            }
        }
    }
    (void)np;
    return hit;
}

double sample_field(const CurvedQuadMesh& mesh, const std::vector<double>& field,
                    const LocatedPoint& at) {
    if (!at.found) {
        fail("sample_field called with an unlocated point");
    }
    return eval2d(mesh.ops, field.data() + at.element * mesh.nodes_per_element(), at.xi,
                  at.eta);
}

} // namespace swedg
