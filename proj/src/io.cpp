#include "swedg/io.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace swedg {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Next content line, skipping blanks and '#' comments.
bool content_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        const auto pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#') continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    }
    return false;
}

// Parse "<tag> <value...>" and return the value part.
std::string tagged(std::istream& in, const std::string& tag) {
    std::string line;
    if (!content_line(in, line)) fail("snapshot: missing '" + tag + "' line");
    std::istringstream s(line);
    std::string got;
    s >> got;
    if (got != tag) fail("snapshot: expected '" + tag + "', got '" + got + "'");
    std::string rest;
    std::getline(s, rest);
    const auto pos = rest.find_first_not_of(" \t");
    return pos == std::string::npos ? std::string() : rest.substr(pos);
}

} // namespace

std::vector<double> node_alpha_max(const BlendField& alpha, const CurvedQuadMesh& mesh) {
    const int np = mesh.np();
    std::vector<double> out(mesh.x.size(), 0.0);
    for (int e = 0; e < mesh.n_elements; ++e)
        for (int j = 0; j < np; ++j)
            for (int i = 0; i < np; ++i) {
                out[mesh.nidx(e, i, j)] = std::max(
                    std::max(alpha.a1[alpha.idx1(e, i, j)], alpha.a1[alpha.idx1(e, i + 1, j)]),
                    std::max(alpha.a2[alpha.idx2(e, i, j)], alpha.a2[alpha.idx2(e, i, j + 1)]));
            }
    return out;
}

void write_field_snapshot(const std::vector<State>& u, const std::vector<double>& b,
                          const BlendField& alpha, const CurvedQuadMesh& mesh, double t,
                          std::ostream& out) {
    if (u.size() != mesh.x.size() || b.size() != mesh.x.size()) {
        fail("snapshot: field sizes do not match the mesh");
    }
    const std::vector<double> amax = node_alpha_max(alpha, mesh);
    const int np = mesh.np();
    out << "SNAPSHOT v1\n";
    out << "t " << num(t) << "\n";
    out << "degree " << mesh.N << "\n";
    out << "elements " << mesh.n_elements << "\n";
    out << "columns element i j x y h hv1 hv2 b H alpha\n";
    for (int e = 0; e < mesh.n_elements; ++e)
        for (int j = 0; j < np; ++j)
            for (int i = 0; i < np; ++i) {
                const int n = mesh.nidx(e, i, j);
                out << e << ' ' << i << ' ' << j << ' ' << num(mesh.x[n]) << ' '
                    << num(mesh.y[n]) << ' ' << num(u[n].h) << ' ' << num(u[n].hv1) << ' '
                    << num(u[n].hv2) << ' ' << num(b[n]) << ' ' << num(u[n].h + b[n]) << ' '
                    << num(amax[n]) << '\n';
            }
    if (!out) fail("snapshot: write failed");
}

Snapshot read_field_snapshot(std::istream& in) {
    std::string line;
    if (!content_line(in, line) || line != "SNAPSHOT v1") {
        fail("snapshot: missing 'SNAPSHOT v1' header");
    }
    Snapshot snap;
    try {
        snap.t = std::stod(tagged(in, "t"));
        snap.degree = std::stoi(tagged(in, "degree"));
        snap.n_elements = std::stoi(tagged(in, "elements"));
    } catch (const std::logic_error&) {
        fail("snapshot: malformed header number");
    }
    if (snap.degree < 1 || snap.n_elements < 1) fail("snapshot: degenerate header");
    const std::string cols = tagged(in, "columns");
    if (cols != "element i j x y h hv1 hv2 b H alpha") {
        fail("snapshot: unexpected column list '" + cols + "'");
    }
    const long np = snap.degree + 1;
    const long want = static_cast<long>(snap.n_elements) * np * np;
    snap.rows.reserve(want);
    for (long r = 0; r < want; ++r) {
        if (!content_line(in, line)) {
            fail("snapshot: expected " + std::to_string(want) + " rows, found " +
                 std::to_string(r));
        }
        std::istringstream s(line);
        SnapshotRow row;
        s >> row.element >> row.i >> row.j >> row.x >> row.y >> row.h >> row.hv1 >>
            row.hv2 >> row.b >> row.H >> row.alpha;
        if (!s) fail("snapshot: malformed row " + std::to_string(r));
        snap.rows.push_back(row);
    }
    return snap;
}

GaugeCsv::GaugeCsv(std::ostream& out, int gauge_count) : out_(&out), count_(gauge_count) {
    if (gauge_count < 1) fail("gauge trace: need at least one gauge");
    *out_ << "t";
    for (int k = 1; k <= count_; ++k) *out_ << ",G" << k;
    *out_ << "\n";
}

void GaugeCsv::row(double t, const std::vector<double>& values) {
    if (static_cast<int>(values.size()) != count_) {
        fail("gauge trace: row has " + std::to_string(values.size()) + " values, header has " +
             std::to_string(count_));
    }
    *out_ << num(t);
    for (const double v : values) *out_ << ',' << num(v);
    *out_ << "\n";
    if (!*out_) fail("gauge trace: write failed");
}

} // namespace swedg
