#include "unidec/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace unidec {
namespace {

void put_u32(std::ofstream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }
void put_i32(std::ofstream& out, std::int32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }
void put_f64(std::ofstream& out, double v) { out.write(reinterpret_cast<const char*>(&v), 8); }

std::uint32_t get_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
std::int32_t get_i32(std::ifstream& in) {
  std::int32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
double get_f64(std::ifstream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

}  // namespace

void save_field(const SpaceTimeField& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write("UDF1", 4);
  put_u32(out, 1u);
  put_u32(out, static_cast<std::uint32_t>(f.g->n));
  put_u32(out, static_cast<std::uint32_t>(f.g->N));
  put_u32(out, static_cast<std::uint32_t>(f.g->r));
  put_u32(out, static_cast<std::uint32_t>(f.g->Nt));
  put_u32(out, f.kind == FieldKind::SpaceTime ? 1u : 0u);
  put_u32(out, f.freq_mask);
  for (int a = 0; a < 3; ++a) put_i32(out, f.g->eps[a]);
  put_f64(out, f.g->T);
  for (const cplx& z : f.v) {
    put_f64(out, z.real());
    put_f64(out, z.imag());
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

SpaceTimeField load_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[4] = {};
  in.read(magic, 4);
  if (std::memcmp(magic, "UDF1", 4) != 0) throw std::runtime_error(path + ": not a UDF1 snapshot");
  const std::uint32_t version = get_u32(in);
  if (version != 1) throw std::runtime_error(path + ": unsupported snapshot version");
  const int n = static_cast<int>(get_u32(in));
  const int N = static_cast<int>(get_u32(in));
  const int r = static_cast<int>(get_u32(in));
  const int Nt = static_cast<int>(get_u32(in));
  const std::uint32_t kind = get_u32(in);
  const std::uint32_t rep = get_u32(in);
  std::array<int, 3> eps{};
  for (int a = 0; a < 3; ++a) eps[a] = get_i32(in);
  const double T = get_f64(in);
  if (!in) throw std::runtime_error(path + ": truncated header");

  GridPtr g = make_grid(n, N, r, T, Nt, eps);
  SpaceTimeField f = make_field(g, kind == 1 ? FieldKind::SpaceTime : FieldKind::Spatial);
  if (rep > f.full_mask()) throw std::runtime_error(path + ": invalid representation mask");
  f.freq_mask = rep;
  for (cplx& z : f.v) {
    const double re = get_f64(in);
    const double im = get_f64(in);
    z = cplx(re, im);
  }
  if (!in) throw std::runtime_error(path + ": truncated payload");
  return f;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  line += '\n';
  return line;
}

}  // namespace unidec
