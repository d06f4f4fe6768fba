#include "lelm/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace lelm {
namespace {

constexpr char kMagic[4] = {'L', 'E', 'L', 'M'};
constexpr std::uint8_t kVersion = 1;

void put(std::ostream& out, const void* p, size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void get(std::istream& in, void* p, size_t n) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (!in) throw std::runtime_error("truncated checkpoint");
}

void put_i32(std::ostream& out, std::int32_t v) { put(out, &v, 4); }
void put_f64(std::ostream& out, double v) { put(out, &v, 8); }
std::int32_t get_i32(std::istream& in) { std::int32_t v; get(in, &v, 4); return v; }
double get_f64(std::istream& in) { double v; get(in, &v, 8); return v; }

void put_vec(std::ostream& out, const Vec& v) {
  put_i32(out, static_cast<std::int32_t>(v.size()));
  put(out, v.data(), static_cast<size_t>(v.size()) * 8);
}

Vec get_vec(std::istream& in) {
  Vec v(get_i32(in));
  get(in, v.data(), static_cast<size_t>(v.size()) * 8);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint '" + path + "'");
  put(out, kMagic, 4);
  put(out, &kVersion, 1);
  put_i32(out, checkpoint.net.depth);
  put_i32(out, checkpoint.net.width);
  put_i32(out, checkpoint.net.input_dim);
  put_vec(out, checkpoint.net.theta);
  const std::uint8_t has_speeds = checkpoint.speeds ? 1 : 0;
  put(out, &has_speeds, 1);
  if (checkpoint.speeds) {
    const SpeedGrid& g = *checkpoint.speeds;
    put_vec(out, g.t_nodes);
    put_vec(out, g.values);
    put_f64(out, g.c);
    put_f64(out, g.x0);
    const std::uint8_t cm = g.constant_mode ? 1 : 0;
    put(out, &cm, 1);
  }
  if (!out) throw std::runtime_error("write failure on checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
  char magic[4];
  get(in, magic, 4);
  std::uint8_t version;
  get(in, &version, 1);
  if (std::memcmp(magic, kMagic, 4) != 0 || version != kVersion)
    throw std::runtime_error("'" + path + "' is not a recognized checkpoint");
  Checkpoint checkpoint;
  const int depth = get_i32(in), width = get_i32(in), input_dim = get_i32(in);
  checkpoint.net = init_network(depth, width, input_dim, 0);
  const Vec theta = get_vec(in);
  if (theta.size() != checkpoint.net.theta.size())
    throw std::runtime_error("checkpoint parameter count mismatch");
  checkpoint.net.theta = theta;
  std::uint8_t has_speeds;
  get(in, &has_speeds, 1);
  if (has_speeds) {
    SpeedGrid g;
    g.t_nodes = get_vec(in);
    g.values = get_vec(in);
    g.c = get_f64(in);
    g.x0 = get_f64(in);
    std::uint8_t cm;
    get(in, &cm, 1);
    g.constant_mode = cm != 0;
    checkpoint.speeds = g;
  }
  return checkpoint;
}

}  // namespace lelm
