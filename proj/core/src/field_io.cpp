#include "bqwave/field_io.hpp"

#include "bqwave/error.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace bqwave::io {

namespace {

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}
  template <class T>
  void pod(T v) {
    os_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void str(const std::string& s) {
    pod<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    os_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void vec(const linalg::Vec& v) {
    pod<std::uint64_t>(static_cast<std::uint64_t>(v.size()));
    os_.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
  }
  void box(const fields::Box& b) {
    pod<std::int32_t>(b.nx);
    pod<double>(b.x0);
    pod<double>(b.hx);
  }
  void scalar(const std::string& name, const fields::ScalarField& f) {
    str(name);
    pod<std::uint8_t>(0);
    box(f.box);
    vec(f.values);
  }
  void vector(const std::string& name, const fields::VectorField& f) {
    str(name);
    pod<std::uint8_t>(1);
    box(f.box);
    pod<std::uint8_t>(f.divergence_free ? 1 : 0);
    vec(f.u);
    vec(f.v);
    vec(f.w);
  }

 private:
  std::ostream& os_;
};

class Reader {
 public:
  Reader(std::istream& is, std::string path) : is_(is), path_(std::move(path)) {}
  template <class T>
  T pod() {
    T v{};
    is_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is_) fail("truncated file");
    return v;
  }
  std::string str() {
    const auto n = pod<std::uint32_t>();
    if (n > (1u << 20)) fail("corrupt string length");
    std::string s(n, '\0');
    is_.read(s.data(), n);
    if (!is_) fail("truncated file");
    return s;
  }
  linalg::Vec vec() {
    const auto n = pod<std::uint64_t>();
    if (n > (std::uint64_t{1} << 32)) fail("corrupt array length");
    linalg::Vec v(static_cast<Eigen::Index>(n));
    is_.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!is_) fail("truncated file");
    return v;
  }
  fields::Box box(const std::shared_ptr<const geometry::CrossSection>& cs) {
    fields::Box b;
    b.nx = pod<std::int32_t>();
    b.x0 = pod<double>();
    b.hx = pod<double>();
    b.cs = cs;
    return b;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(path_ + ": " + what);
  }

 private:
  std::istream& is_;
  std::string path_;
};

void check_size(const Reader& r, std::size_t got, std::size_t want, const std::string& name) {
  if (got != want) r.fail("field '" + name + "' has " + std::to_string(got) + " entries, expected " +
                          std::to_string(want));
}

}  // namespace

void write_state(const std::string& path, const geometry::SectionSpec& section,
                 const fixedpoint::Setup& setup, const fixedpoint::WaveState& s) {
  std::ostringstream os(std::ios::binary);
  Writer w(os);
  os.write("BQFL", 4);
  w.pod<std::uint32_t>(kBqflVersion);

  w.pod<std::uint8_t>(section.kind == geometry::SectionKind::rectangle ? 0 : 1);
  w.pod<double>(section.ly);
  w.pod<double>(section.lz);
  w.pod<std::int32_t>(section.ny);
  w.pod<std::int32_t>(section.nz);
  w.pod<std::uint32_t>(static_cast<std::uint32_t>(section.vertices.size()));
  for (const auto& p : section.vertices) {
    w.pod<double>(p[0]);
    w.pod<double>(p[1]);
  }

  const auto& ph = setup.phys;
  w.pod<double>(ph.nu);
  for (double r : ph.rho) w.pod<double>(r);
  w.pod<std::int32_t>(ph.d);
  w.pod<std::uint8_t>(ph.reaction.family == reaction::Family::hat ? 0 : 1);
  w.pod<double>(ph.reaction.k);
  w.pod<double>(ph.reaction.theta0);
  w.pod<std::uint8_t>(setup.cpw == geometry::CpwConvention::sharp ? 0 : 1);
  w.pod<std::uint8_t>(setup.origin == geometry::OriginConvention::centroid ? 0 : 1);

  w.pod<double>(s.grid.a());
  w.pod<std::int32_t>(s.grid.half_cells());
  w.pod<std::int32_t>(s.grid.offset());
  w.pod<double>(s.c);
  w.pod<double>(s.tau);
  w.pod<std::int32_t>(s.iterations);
  w.pod<double>(s.damping);
  w.pod<std::uint8_t>(s.converged ? 1 : 0);
  w.pod<std::uint8_t>(s.flow_stats.scheme == fields::AdvectionScheme::upwind ? 1 : 0);
  w.vec(Eigen::Map<const linalg::Vec>(s.residuals.data(),
                                      static_cast<Eigen::Index>(s.residuals.size())));

  const bool has_flow = s.u.box.nx != 0;
  w.pod<std::uint32_t>(has_flow ? 6 : 2);
  w.scalar("T", s.t);
  w.vector("v", s.v);
  if (has_flow) {
    w.scalar("T_ext", s.t_ext);
    w.vector("v_ext", s.v_ext);
    w.vector("u", s.u);
    w.scalar("p", s.p);
  }

  const std::string bytes = os.str();
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("write to '" + path + "' failed");
}

StateDump read_state(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  Reader r(f, path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, "BQFL", 4) != 0) r.fail("not a BQFL file");
  const auto version = r.pod<std::uint32_t>();
  if (version != kBqflVersion) r.fail("unsupported BQFL version " + std::to_string(version));

  StateDump out;
  auto& sec = out.section;
  sec.kind = r.pod<std::uint8_t>() == 0 ? geometry::SectionKind::rectangle
                                        : geometry::SectionKind::polygon;
  sec.ly = r.pod<double>();
  sec.lz = r.pod<double>();
  sec.ny = r.pod<std::int32_t>();
  sec.nz = r.pod<std::int32_t>();
  const auto nv = r.pod<std::uint32_t>();
  for (std::uint32_t i = 0; i < nv; ++i) {
    const double y = r.pod<double>();
    const double z = r.pod<double>();
    sec.vertices.push_back({y, z});
  }
  auto cs = std::make_shared<const geometry::CrossSection>(geometry::build_section(sec));

  auto& su = out.setup;
  su.cs = cs;
  su.phys.nu = r.pod<double>();
  for (double& x : su.phys.rho) x = r.pod<double>();
  su.phys.d = r.pod<std::int32_t>();
  su.phys.reaction.family = r.pod<std::uint8_t>() == 0 ? reaction::Family::hat
                                                       : reaction::Family::quadratic;
  su.phys.reaction.k = r.pod<double>();
  su.phys.reaction.theta0 = r.pod<double>();
  su.cpw = r.pod<std::uint8_t>() == 0 ? geometry::CpwConvention::sharp
                                      : geometry::CpwConvention::literal;
  su.origin = r.pod<std::uint8_t>() == 0 ? geometry::OriginConvention::centroid
                                         : geometry::OriginConvention::as_given;

  auto& s = out.state;
  const double a = r.pod<double>();
  const int n = r.pod<std::int32_t>();
  const int m = r.pod<std::int32_t>();
  if (!(a > 0.0) || n < 1 || m < 1) r.fail("invalid grid header");
  s.grid = fields::AxialGrid(a, n, m * (a / n), cs);
  if (s.grid.offset() != m) r.fail("grid offset mismatch");
  s.c = r.pod<double>();
  s.tau = r.pod<double>();
  s.iterations = r.pod<std::int32_t>();
  s.damping = r.pod<double>();
  s.converged = r.pod<std::uint8_t>() != 0;
  s.flow_stats.scheme =
      r.pod<std::uint8_t>() ? fields::AdvectionScheme::upwind : fields::AdvectionScheme::centered;
  const linalg::Vec res = r.vec();
  s.residuals.assign(res.data(), res.data() + res.size());

  const auto count = r.pod<std::uint32_t>();
  for (std::uint32_t q = 0; q < count; ++q) {
    const std::string name = r.str();
    const auto kind = r.pod<std::uint8_t>();
    const auto b = r.box(cs);
    if (kind == 0) {
      fields::ScalarField sf(b);
      sf.values = r.vec();
      check_size(r, static_cast<std::size_t>(sf.values.size()), b.cells(), name);
      if (name == "T") s.t = std::move(sf);
      else if (name == "T_ext") s.t_ext = std::move(sf);
      else if (name == "p") s.p = std::move(sf);
      else r.fail("unknown scalar field '" + name + "'");
    } else if (kind == 1) {
      fields::VectorField vf(b);
      vf.divergence_free = r.pod<std::uint8_t>() != 0;
      vf.u = r.vec();
      vf.v = r.vec();
      vf.w = r.vec();
      check_size(r, static_cast<std::size_t>(vf.u.size()), b.u_size(), name);
      check_size(r, static_cast<std::size_t>(vf.v.size()), b.v_size(), name);
      check_size(r, static_cast<std::size_t>(vf.w.size()), b.w_size(), name);
      if (name == "v") s.v = std::move(vf);
      else if (name == "v_ext") s.v_ext = std::move(vf);
      else if (name == "u") s.u = std::move(vf);
      else r.fail("unknown vector field '" + name + "'");
    } else {
      r.fail("unknown field kind");
    }
  }
  if (!s.t.box.same_as(s.grid.temperature_box())) r.fail("temperature box does not match R_a");
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_profiles_csv(std::ostream& out, const diagnostics::Profiles& p) {
  out << "x,M,m,mean\n";
  for (std::size_t i = 0; i < p.x.size(); ++i)
    out << format_double(p.x[i]) << ',' << format_double(p.max[i]) << ','
        << format_double(p.min[i]) << ',' << format_double(p.mean[i]) << '\n';
}

void write_profiles_csv(const std::string& path, const diagnostics::Profiles& p) {
  std::ostringstream os;
  write_profiles_csv(os, p);
  write_text(path, os.str());
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  write_text(path, os.str());
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw Error("write to '" + path + "' failed");
}

}  // namespace bqwave::io
