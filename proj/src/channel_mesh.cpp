#include "swedg/cases.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace swedg {

namespace {

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

// Deduplicates vertices by nanometer-rounded coordinates; identical
// construction expressions land on identical node ids.
struct MeshBuilder {
    QuadMeshSpec spec;
    std::map<std::pair<long long, long long>, int> ids;

    int node(double x, double y) {
        const std::pair<long long, long long> key{std::llround(x * 1e9),
                                                  std::llround(y * 1e9)};
        const auto [it, fresh] = ids.emplace(key, static_cast<int>(spec.nodes.size()));
        if (fresh) spec.nodes.push_back({x, y});
        return it->second;
    }

    int quad(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
        QuadMeshSpec::Element el;
        el.corners = {node(a.x1, a.x2), node(b.x1, b.x2), node(c.x1, c.x2),
                      node(d.x1, d.x2)};
        spec.elements.push_back(el);
        return static_cast<int>(spec.elements.size()) - 1;
    }
};

} // namespace

// Channel geometry, reconstructed from the published description of the
// laboratory dam-break experiment it reproduces: a 3.6 m wide channel, a
// 6.75 m reservoir closed by a 0.8 m thick wall with a 1 m wide gate
// centered on the axis, and a 0.8 m x 0.4 m building rotated 64 degrees
// against the channel axis about 3.7 m downstream of the gate. The numerical
// domain is truncated at x = 16 m where the flow exits. Row lines are placed
// on the bed kinks (y = 0.34, 3.26) and the gate lips (y = 1.3, 2.3).
QuadMeshSpec build_channel_mesh() {
    MeshBuilder bld;

    std::vector<double> xres(14), xdown(25);
    for (int k = 0; k <= 13; ++k) xres[k] = 6.75 * k / 13.0;
    for (int k = 0; k <= 24; ++k) xdown[k] = 7.55 + 8.45 * k / 24.0;
    const std::vector<double> xgate = {6.75, 7.15, 7.55};
    const std::vector<double> ys = {0.0, 0.34, 0.58, 0.82, 1.3, 1.8,
                                    2.3, 2.78, 3.02, 3.26, 3.6};

    const auto cell = [&](double xa, double xb, double ya, double yb) {
        return bld.quad({xa, ya}, {xb, ya}, {xb, yb}, {xa, yb});
    };

    // Reservoir block, full channel width.
    for (int k = 0; k < 13; ++k)
        for (int r = 0; r < 10; ++r) cell(xres[k], xres[k + 1], ys[r], ys[r + 1]);

    // Gate throat between the wall pylons; the pylons themselves are holes
    // whose exposed faces default to walls.
    for (int k = 0; k < 2; ++k)
        for (int r = 4; r <= 5; ++r) cell(xgate[k], xgate[k + 1], ys[r], ys[r + 1]);

    // Downstream grid with a 5x4-cell patch left open around the obstacle;
    // the rightmost column opens into the outflow.
    for (int k = 0; k < 24; ++k)
        for (int r = 0; r < 10; ++r) {
            if (k >= 8 && k <= 12 && r >= 3 && r <= 6) continue;
            const int e = cell(xdown[k], xdown[k + 1], ys[r], ys[r + 1]);
            if (k == 23)
                bld.spec.boundary.emplace_back(4 * e + 1, BoundaryTag::outflow);
        }

    // Outer ring: the patch boundary, counterclockwise from its lower-left
    // corner, one vertex per grid line it crosses.
    std::vector<Vec2> outer;
    for (int k = 8; k <= 12; ++k) outer.push_back({xdown[k], ys[3]});
    for (int r = 3; r <= 6; ++r) outer.push_back({xdown[13], ys[r]});
    for (int k = 13; k >= 9; --k) outer.push_back({xdown[k], ys[7]});
    for (int r = 7; r >= 4; --r) outer.push_back({xdown[8], ys[r]});

    // Inner ring: the obstacle outline, counterclockwise, long sides split
    // into 6 segments and short sides into 3 so both rings carry 18 vertices.
    const Vec2 center{11.25, 1.8};
    const double tilt = 64.0 * kPi / 180.0;
    const Vec2 e1{std::cos(tilt), std::sin(tilt)};
    const Vec2 e2{-std::sin(tilt), std::cos(tilt)};
    const Vec2 c0 = center - 0.4 * e1 - 0.2 * e2;
    const Vec2 c1 = center + 0.4 * e1 - 0.2 * e2;
    const Vec2 c2 = center + 0.4 * e1 + 0.2 * e2;
    const Vec2 c3 = center - 0.4 * e1 + 0.2 * e2;
    std::vector<Vec2> inner;
    const auto edge = [&inner](Vec2 a, Vec2 b, int nseg) {
        for (int s = 0; s < nseg; ++s) {
            const double f = static_cast<double>(s) / nseg;
            inner.push_back((1.0 - f) * a + f * b);
        }
    };
    edge(c0, c1, 6);
    edge(c1, c2, 3);
    edge(c2, c3, 6);
    edge(c3, c0, 3);

    // Cyclic alignment that keeps the connecting spokes shortest overall.
    const int ring = 18;
    int shift = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < ring; ++r) {
        double sum = 0.0;
        for (int s = 0; s < ring; ++s) {
            const Vec2 d = outer[s] - inner[(s + r) % ring];
            sum += dot(d, d);
        }
        if (sum < best) {
            best = sum;
            shift = r;
        }
    }

    const int layers = 6;
    const auto ringpt = [&](int s, int l) {
        const Vec2 pi = inner[(s + shift) % ring];
        const Vec2 po = outer[s % ring];
        const double f = static_cast<double>(l) / layers;
        return (1.0 - f) * pi + f * po;
    };
    for (int s = 0; s < ring; ++s)
        for (int l = 0; l < layers; ++l)
            bld.quad(ringpt(s + 1, l), ringpt(s, l), ringpt(s, l + 1),
                     ringpt(s + 1, l + 1));

    if (bld.spec.elements.size() != 462)
        fail("channel mesh construction produced " +
             std::to_string(bld.spec.elements.size()) + " elements instead of 462");

    // Every quad must be strictly convex and counterclockwise.
    for (std::size_t e = 0; e < bld.spec.elements.size(); ++e) {
        const auto& corners = bld.spec.elements[e].corners;
        for (int c = 0; c < 4; ++c) {
            const Vec2 a = bld.spec.nodes[corners[c]];
            const Vec2 b = bld.spec.nodes[corners[(c + 1) % 4]];
            const Vec2 d = bld.spec.nodes[corners[(c + 2) % 4]];
            const double cross =
                (b.x1 - a.x1) * (d.x2 - b.x2) - (b.x2 - a.x2) * (d.x1 - b.x1);
            if (!(cross > 0.0))
                fail("channel mesh element " + std::to_string(e) +
                     " is not convex counterclockwise");
        }
    }
    return bld.spec;
}

} // namespace swedg
