#pragma once

#include <iosfwd>
#include <vector>

#include "swedg/mesh.hpp"
#include "swedg/physics.hpp"
#include "swedg/semidiscretization.hpp"

namespace swedg {

// One node row of a field snapshot, in file order.
struct SnapshotRow {
    int element = 0;
    int i = 0;
    int j = 0;
    double x = 0.0;
    double y = 0.0;
    double h = 0.0;
    double hv1 = 0.0;
    double hv2 = 0.0;
    double b = 0.0;
    double H = 0.0;
    double alpha = 0.0;
};

struct Snapshot {
    double t = 0.0;
    int degree = 0;
    int n_elements = 0;
    std::vector<SnapshotRow> rows;
};

// Largest blending weight on any interface touching each node; the alpha
// column of a snapshot.
std::vector<double> node_alpha_max(const BlendField& alpha, const CurvedQuadMesh& mesh);

// Plain-text columnar snapshot: a fixed header (time, degree, element count,
// column names) followed by one row per node in storage order. All numbers
// carry 17 significant digits, so the companion reader recovers the written
// doubles exactly.
void write_field_snapshot(const std::vector<State>& u, const std::vector<double>& b,
                          const BlendField& alpha, const CurvedQuadMesh& mesh, double t,
                          std::ostream& out);
Snapshot read_field_snapshot(std::istream& in);

// Gauge trace as CSV: header `t,G1,...,Gk`, then one sample row per call.
class GaugeCsv {
  public:
    GaugeCsv(std::ostream& out, int gauge_count);
    void row(double t, const std::vector<double>& values);

  private:
    std::ostream* out_;
    int count_;
};

} // namespace swedg
