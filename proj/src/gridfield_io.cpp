#include <cstdio>
#include <fstream>
#include <sstream>

#include "gradlab/fields.hpp"

namespace gradlab {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::filesystem::path sidecar(const std::filesystem::path& p) {
  return std::filesystem::path(p.string() + ".json");
}

}  // namespace

void write_gridfield(const GridField& g, const std::filesystem::path& path,
                     const nlohmann::json& extra_meta) {
  std::ofstream out(path);
  if (!out) throw FieldError("write_gridfield: cannot open " + path.string());
  out << "gridfield " << g.n() << ' ' << g.m();
  for (double h : g.h()) out << ' ' << format_double(h);
  for (int e : g.extents()) out << ' ' << e;
  out << '\n';
  const auto& v = g.values();
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    for (int c = 0; c < g.m(); ++c) {
      if (c) out << ' ';
      out << format_double(v[k * g.m() + c]);
    }
    out << '\n';
  }
  if (!out) throw FieldError("write_gridfield: write failed for " + path.string());

  nlohmann::json meta = extra_meta;
  meta["format"] = "gridfield";
  meta["n"] = g.n();
  meta["m"] = g.m();
  meta["origin"] = g.origin();
  meta["h"] = g.h();
  meta["extents"] = g.extents();
  meta["order"] = "row-major, first axis slowest";
  std::ofstream side(sidecar(path));
  side << meta.dump(2) << '\n';
  if (!side) throw FieldError("write_gridfield: cannot write sidecar for " + path.string());
}

GridField read_gridfield(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FieldError("read_gridfield: cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string tag;
  int n = 0;
  int m = 0;
  hs >> tag >> n >> m;
  if (tag != "gridfield" || (n != 1 && n != 2) || m < 1) {
    throw FieldError("read_gridfield: bad header in " + path.string());
  }
  std::vector<double> h(n);
  std::vector<int> extents(n);
  for (double& v : h) hs >> v;
  for (int& e : extents) hs >> e;
  if (!hs) throw FieldError("read_gridfield: truncated header in " + path.string());

  std::vector<double> origin(n, 0.0);
  if (std::filesystem::exists(sidecar(path))) {
    std::ifstream side(sidecar(path));
    const auto meta = nlohmann::json::parse(side);
    if (meta.contains("origin")) origin = meta.at("origin").get<std::vector<double>>();
  }

  std::size_t count = static_cast<std::size_t>(m);
  for (int e : extents) count *= static_cast<std::size_t>(std::max(e, 0));
  std::vector<double> values;
  values.reserve(count);
  double v = 0.0;
  while (values.size() < count && in >> v) values.push_back(v);
  if (values.size() != count) {
    throw FieldError("read_gridfield: expected " + std::to_string(count) + " values in " +
                     path.string());
  }
  return GridField(n, m, origin, h, extents, std::move(values));
}

}  // namespace gradlab
