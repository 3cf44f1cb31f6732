#include "invrig/dataio.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "invrig/errors.hpp"

namespace invrig {

namespace {

constexpr std::string_view kRigMagic = "invrig-rig";
constexpr std::string_view kAnimMagic = "invrig-anim";

// Whitespace tokenizer over an in-memory document.
class Tokens {
 public:
  explicit Tokens(std::string text) : text_(std::move(text)) {}

  std::string_view next() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
    if (pos_ >= text_.size()) {
      throw DataError("unexpected end of file");
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
    return std::string_view(text_).substr(start, pos_ - start);
  }

  void expect(std::string_view word) {
    const auto got = next();
    if (got != word) {
      throw DataError(fmt::format("expected '{}', found '{}'", word, got));
    }
  }

  template <typename T>
  T number() {
    const auto tok = next();
    T value{};
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
      throw DataError(fmt::format("malformed number '{}'", tok));
    }
    return value;
  }

  Index count(std::string_view label) {
    expect(label);
    const auto v = number<long long>();
    if (v < 0) throw DataError(fmt::format("negative {}", label));
    return static_cast<Index>(v);
  }

  void read_values(Eigen::Ref<Eigen::VectorXd> out) {
    for (Index k = 0; k < out.size(); ++k) out[k] = number<double>();
  }

  void expect_end() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
    if (pos_ != text_.size()) throw DataError("trailing content after last block");
  }

 private:
  static bool is_space(char c) {
    return c == ' ' || c == '\n' || c == '\t' || c == '\r';
  }

  std::string text_;
  std::size_t pos_ = 0;
};

std::string slurp(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void put(fmt::memory_buffer& buf, double v) { fmt::format_to(std::back_inserter(buf), "{:.17g}", v); }

template <typename Vec>
void put_vertices(fmt::memory_buffer& buf, const Vec& coords) {
  for (Index k = 0; k < coords.size(); k += 3) {
    put(buf, coords[k]);
    buf.push_back(' ');
    put(buf, coords[k + 1]);
    buf.push_back(' ');
    put(buf, coords[k + 2]);
    buf.push_back('\n');
  }
}

void flush(std::ostream& out, const fmt::memory_buffer& buf) {
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw DataError("write failed");
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  return out;
}

}  // namespace

std::string_view to_string(FrameKind kind) {
  return kind == FrameKind::Weights ? "weights" : "mesh";
}

Mesh Animation::mesh(Index t) const {
  if (kind != FrameKind::Mesh) throw ContractError("animation holds weights, not meshes");
  return Mesh(frames.col(t));
}

WeightVector Animation::weights(Index t) const {
  if (kind != FrameKind::Weights) throw ContractError("animation holds meshes, not weights");
  return frames.col(t);
}

std::vector<Mesh> Animation::meshes() const {
  std::vector<Mesh> out;
  out.reserve(static_cast<std::size_t>(frame_count()));
  for (Index t = 0; t < frame_count(); ++t) out.push_back(mesh(t));
  return out;
}

Animation Animation::from_meshes(std::span<const Mesh> meshes, NoiseRecord noise) {
  Animation anim;
  anim.kind = FrameKind::Mesh;
  anim.noise = noise;
  const Index width = meshes.empty() ? 0 : meshes.front().size();
  anim.frames.resize(width, static_cast<Index>(meshes.size()));
  for (std::size_t t = 0; t < meshes.size(); ++t) {
    if (meshes[t].size() != width) throw ContractError("frames differ in length");
    anim.frames.col(static_cast<Index>(t)) = meshes[t].coords();
  }
  return anim;
}

Animation Animation::from_weights(const Eigen::MatrixXd& weights) {
  Animation anim;
  anim.kind = FrameKind::Weights;
  anim.frames = weights;
  return anim;
}

void save_rig(std::ostream& out, const BlendshapeRig& rig) {
  fmt::memory_buffer buf;
  auto it = std::back_inserter(buf);
  fmt::format_to(it, "{} {}\nvertices {}\nblendshapes {}\ncorrections {}\n",
                 kRigMagic, kRigFormatVersion, rig.vertex_count(),
                 rig.blendshape_count(), rig.corrections().size());
  fmt::format_to(it, "neutral\n");
  put_vertices(buf, rig.neutral().coords());
  for (Index i = 0; i < rig.blendshape_count(); ++i) {
    fmt::format_to(it, "blendshape {}\n", i);
    put_vertices(buf, rig.blendshape(i));
  }
  for (const auto& term : rig.corrections()) {
    fmt::format_to(it, "correction {}", term.order());
    for (Index j : term.indices()) fmt::format_to(it, " {}", j);
    buf.push_back('\n');
    put_vertices(buf, term.offset());
  }
  flush(out, buf);
}

BlendshapeRig load_rig(std::istream& in) {
  Tokens tok(slurp(in));
  tok.expect(kRigMagic);
  const int version = tok.number<int>();
  if (version != kRigFormatVersion) {
    throw DataError(fmt::format("unsupported rig format version {}", version));
  }
  const Index n = tok.count("vertices");
  const Index m = tok.count("blendshapes");
  const Index k = tok.count("corrections");
  const Index dim = 3 * n;

  tok.expect("neutral");
  Vector neutral(dim);
  tok.read_values(neutral);

  Eigen::MatrixXd basis(dim, m);
  for (Index i = 0; i < m; ++i) {
    tok.expect("blendshape");
    if (tok.number<long long>() != i) throw DataError("blendshapes out of order");
    tok.read_values(basis.col(i));
  }

  std::vector<CorrectiveTerm> terms;
  terms.reserve(static_cast<std::size_t>(k));
  for (Index t = 0; t < k; ++t) {
    tok.expect("correction");
    const int order = tok.number<int>();
    if (order < 2 || order > 4) {
      throw DataError(fmt::format("correction order {} not in 2..4", order));
    }
    std::array<Index, 4> idx{};
    for (int j = 0; j < order; ++j) idx[static_cast<std::size_t>(j)] = tok.number<long long>();
    Vector offset(dim);
    tok.read_values(offset);
    try {
      terms.emplace_back(std::span<const Index>(idx.data(), static_cast<std::size_t>(order)),
                         std::move(offset));
    } catch (const ContractError& e) {
      throw DataError(e.what());
    }
  }
  tok.expect_end();
  try {
    return BlendshapeRig(Mesh(std::move(neutral)), std::move(basis), std::move(terms));
  } catch (const ContractError& e) {
    throw DataError(e.what());
  }
}

void save_rig(const std::filesystem::path& path, const BlendshapeRig& rig) {
  auto out = open_out(path);
  save_rig(out, rig);
}

BlendshapeRig load_rig(const std::filesystem::path& path) {
  auto in = open_in(path);
  return load_rig(in);
}

void save_animation(std::ostream& out, const Animation& anim) {
  fmt::memory_buffer buf;
  auto it = std::back_inserter(buf);
  fmt::format_to(it,
                 "{} {}\nkind {}\nframes {}\nwidth {}\nnoise {}\nsigma2 {:.17g}\nseed {}\n",
                 kAnimMagic, kAnimationFormatVersion, to_string(anim.kind),
                 anim.frame_count(), anim.width(),
                 anim.noise.noisy ? "noisy" : "clean", anim.noise.sigma2,
                 anim.noise.seed);
  for (Index t = 0; t < anim.frame_count(); ++t) {
    fmt::format_to(it, "frame {}\n", t);
    const auto col = anim.frames.col(t);
    if (anim.kind == FrameKind::Mesh) {
      put_vertices(buf, col);
    } else {
      for (Index k = 0; k < col.size(); ++k) {
        if (k > 0) buf.push_back(' ');
        put(buf, col[k]);
      }
      buf.push_back('\n');
    }
  }
  flush(out, buf);
}

Animation load_animation(std::istream& in) {
  Tokens tok(slurp(in));
  tok.expect(kAnimMagic);
  const int version = tok.number<int>();
  if (version != kAnimationFormatVersion) {
    throw DataError(fmt::format("unsupported animation format version {}", version));
  }
  Animation anim;
  tok.expect("kind");
  const auto kind = tok.next();
  if (kind == "weights") {
    anim.kind = FrameKind::Weights;
  } else if (kind == "mesh") {
    anim.kind = FrameKind::Mesh;
  } else {
    throw DataError(fmt::format("unknown frame kind '{}'", kind));
  }
  const Index frames = tok.count("frames");
  const Index width = tok.count("width");
  if (anim.kind == FrameKind::Mesh && width % 3 != 0) {
    throw DataError("mesh frame width is not a multiple of 3");
  }
  tok.expect("noise");
  const auto noise = tok.next();
  if (noise != "clean" && noise != "noisy") {
    throw DataError(fmt::format("unknown noise flag '{}'", noise));
  }
  anim.noise.noisy = noise == "noisy";
  tok.expect("sigma2");
  anim.noise.sigma2 = tok.number<double>();
  tok.expect("seed");
  anim.noise.seed = tok.number<std::uint64_t>();

  anim.frames.resize(width, frames);
  for (Index t = 0; t < frames; ++t) {
    tok.expect("frame");
    if (tok.number<long long>() != t) throw DataError("frames out of order");
    tok.read_values(anim.frames.col(t));
  }
  tok.expect_end();
  if (!anim.frames.allFinite()) throw DataError("animation contains non-finite values");
  return anim;
}

void save_animation(const std::filesystem::path& path, const Animation& anim) {
  auto out = open_out(path);
  save_animation(out, anim);
}

Animation load_animation(const std::filesystem::path& path) {
  auto in = open_in(path);
  return load_animation(in);
}

}  // namespace invrig
