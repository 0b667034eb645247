#include "regconv/prefix_table.hpp"

#include <cstdlib>
#include <cstring>
#include <istream>
#include <ostream>

#include "regconv/kahan.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace regconv {

std::int64_t cell_budget() {
  static const std::int64_t budget = [] {
    if (const char* env = std::getenv("REGCONV_CELL_BUDGET")) {
      const std::int64_t v = std::atoll(env);
      if (v > 0) return v;
    }
    return std::int64_t{1} << 28;
  }();
  return budget;
}

namespace detail {

DenseGrid::DenseGrid(const MultiIndex& horizon) : horizon_(horizon) {
  std::int64_t volume = 1;
  for (int p = 0; p < horizon.dim(); ++p) {
    if (horizon[p] < 0) throw std::invalid_argument("DenseGrid: negative horizon");
    volume *= horizon[p] + 1;
    if (volume > cell_budget())
      throw ResourceError("table of " + horizon.to_string() +
                          " exceeds the cell budget of " + std::to_string(cell_budget()) +
                          " (set REGCONV_CELL_BUDGET to raise it)");
  }
  cells_.assign(static_cast<std::size_t>(volume), Complex{0.0, 0.0});
}

}  // namespace detail

namespace {

// Fill raw terms, one cell per lattice point. Cells are independent.
void fill_terms(detail::DenseGrid& grid, const std::function<Complex(const MultiIndex&)>& eval,
                Exec exec) {
  const std::int64_t n = grid.size();
  Complex* cells = grid.data();
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) cells[i] = eval(grid.unrank(i));
  } else {
    for (std::int64_t i = 0; i < n; ++i) cells[i] = eval(grid.unrank(i));
  }
}

// One compensated running sum along each line parallel to `axis`. Lines are
// independent, each handled serially by one thread, so thread count never
// changes the bits.
void prefix_sweep_axis(detail::DenseGrid& grid, int axis, Exec exec) {
  const int m = grid.dim();
  const std::int64_t len = grid.horizon()[axis] + 1;
  std::int64_t stride = 1;
  for (int p = m - 1; p > axis; --p) stride *= grid.horizon()[p] + 1;
  const std::int64_t lines = grid.size() / len;
  Complex* cells = grid.data();

  auto line_base = [&](std::int64_t line) {
    // Decompose the line id over the axes other than `axis` (row-major).
    std::int64_t base = 0;
    std::int64_t rest = line;
    for (int p = m - 1; p >= 0; --p) {
      if (p == axis) continue;
      const std::int64_t plen = grid.horizon()[p] + 1;
      const std::int64_t coord = rest % plen;
      rest /= plen;
      std::int64_t pstride = 1;
      for (int r = m - 1; r > p; --r) pstride *= grid.horizon()[r] + 1;
      base += coord * pstride;
    }
    return base;
  };

  auto sweep_line = [&](std::int64_t line) {
    const std::int64_t base = line_base(line);
    KahanComplexSum acc;
    for (std::int64_t j = 0; j < len; ++j) {
      acc.add(cells[base + j * stride]);
      cells[base + j * stride] = acc.value();
    }
  };

  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t line = 0; line < lines; ++line) sweep_line(line);
  } else {
    for (std::int64_t line = 0; line < lines; ++line) sweep_line(line);
  }
}

void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

void write_f64(std::ostream& os, double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, 8);
  write_u64(os, v);
}

std::uint32_t read_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint64_t read_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double read_f64(std::istream& is) {
  const std::uint64_t v = read_u64(is);
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}

constexpr std::uint32_t kDumpMagic = 0x42544352;  // "RCTB"
constexpr std::uint32_t kDumpVersion = 1;

}  // namespace

PartialSumTable PartialSumTable::build(const TermSource& src, const MultiIndex& horizon,
                                       Exec exec) {
  if (src.dim != horizon.dim())
    throw std::invalid_argument("PartialSumTable: source/horizon dimension mismatch");
  PartialSumTable t;
  t.grid_ = detail::DenseGrid(horizon);
  fill_terms(t.grid_, src.eval, exec);
  for (int p = 0; p < horizon.dim(); ++p) prefix_sweep_axis(t.grid_, p, exec);
  return t;
}

PartialSumTable PartialSumTable::build_reference(const TermSource& src,
                                                 const MultiIndex& horizon) {
  if (src.dim != horizon.dim())
    throw std::invalid_argument("PartialSumTable: source/horizon dimension mismatch");
  PartialSumTable t;
  t.grid_ = detail::DenseGrid(horizon);
  auto& grid = t.grid_;
  const int m = horizon.dim();
  Complex* cells = grid.data();

  std::int64_t strides[kMaxDim];
  std::int64_t s = 1;
  for (int p = m - 1; p >= 0; --p) {
    strides[p] = s;
    s *= horizon[p] + 1;
  }

  const std::int64_t n = grid.size();
  for (std::int64_t i = 0; i < n; ++i) {
    const MultiIndex idx = grid.unrank(i);
    Complex v = src.eval(idx);
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
      bool in_range = true;
      std::int64_t off = i;
      for (int p = 0; p < m; ++p) {
        if (mask & (1u << p)) {
          if (idx[p] == 0) {
            in_range = false;  // below-zero corner: contributes zero
            break;
          }
          off -= strides[p];
        }
      }
      if (!in_range) continue;
      const int sign = (__builtin_popcount(mask) % 2 == 0) ? +1 : -1;
      // S(l) = c(l) - sum_{delta != 0} (-1)^{|delta|} S(l - delta)
      v -= static_cast<double>(sign) * cells[off];
    }
    cells[i] = v;
  }
  return t;
}

Complex PartialSumTable::cell(const MultiIndex& idx) const {
  if (idx.dim() != dim()) throw std::invalid_argument("PartialSumTable::cell: dimension mismatch");
  for (int p = 0; p < dim(); ++p) {
    if (idx[p] == kBelowZero) return {0.0, 0.0};
    if (idx[p] < 0 || idx[p] > horizon()[p])
      throw std::out_of_range("PartialSumTable::cell: index " + idx.to_string() +
                              " beyond horizon " + horizon().to_string());
  }
  return grid_.data()[grid_.rank(idx)];
}

Complex PartialSumTable::subrect_sum(const LatticeBox& box) const {
  if (box.dim() != dim())
    throw std::invalid_argument("PartialSumTable::subrect_sum: dimension mismatch");
  if (!componentwise_leq(box.hi, horizon()))
    throw std::out_of_range("PartialSumTable::subrect_sum: box " + box.to_string() +
                            " exceeds horizon " + horizon().to_string() +
                            "; extend the table first");
  const int m = dim();
  Complex total{0.0, 0.0};
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    MultiIndex corner = box.hi;
    bool below = false;
    for (int p = 0; p < m; ++p) {
      if (mask & (1u << p)) {
        if (box.lo[p] == 0) {
          below = true;
          break;
        }
        corner[p] = box.lo[p] - 1;
      }
    }
    if (below) continue;
    const double sign = (__builtin_popcount(mask) % 2 == 0) ? 1.0 : -1.0;
    total += sign * grid_.data()[grid_.rank(corner)];
  }
  return total;
}

PartialSumTable PartialSumTable::extended(const TermSource& src, const MultiIndex& new_horizon,
                                          Exec exec) const {
  if (!componentwise_leq(horizon(), new_horizon))
    throw std::invalid_argument("PartialSumTable::extended: new horizon must dominate the old one");
  return build(src, new_horizon, exec);
}

void PartialSumTable::dump(std::ostream& os) const {
  write_u32(os, kDumpMagic);
  write_u32(os, kDumpVersion);
  write_u32(os, static_cast<std::uint32_t>(dim()));
  for (int p = 0; p < dim(); ++p) write_u64(os, static_cast<std::uint64_t>(horizon()[p]));
  const Complex* cells = grid_.data();
  for (std::int64_t i = 0; i < size(); ++i) {
    write_f64(os, cells[i].real());
    write_f64(os, cells[i].imag());
  }
}

PartialSumTable PartialSumTable::load(std::istream& is) {
  if (read_u32(is) != kDumpMagic) throw std::runtime_error("PartialSumTable::load: bad magic");
  if (read_u32(is) != kDumpVersion)
    throw std::runtime_error("PartialSumTable::load: unsupported version");
  const int m = static_cast<int>(read_u32(is));
  if (m < 1 || m > kMaxDim) throw std::runtime_error("PartialSumTable::load: bad dimension");
  MultiIndex horizon = MultiIndex::zeros(m);
  for (int p = 0; p < m; ++p) horizon[p] = static_cast<std::int64_t>(read_u64(is));
  PartialSumTable t;
  t.grid_ = detail::DenseGrid(horizon);
  Complex* cells = t.grid_.data();
  for (std::int64_t i = 0; i < t.size(); ++i) {
    const double re = read_f64(is);
    const double im = read_f64(is);
    cells[i] = {re, im};
  }
  if (!is) throw std::runtime_error("PartialSumTable::load: truncated stream");
  return t;
}

SequenceTable SequenceTable::build(const std::function<Complex(const MultiIndex&)>& f,
                                   const MultiIndex& horizon, Exec exec) {
  SequenceTable t;
  t.grid_ = detail::DenseGrid(horizon);
  fill_terms(t.grid_, f, exec);
  return t;
}

Complex SequenceTable::at(const MultiIndex& idx) const {
  for (int p = 0; p < dim(); ++p) {
    if (idx[p] == kBelowZero) return {0.0, 0.0};
    if (idx[p] < 0 || idx[p] > horizon()[p])
      throw std::out_of_range("SequenceTable::at: index beyond horizon");
  }
  return grid_.data()[grid_.rank(idx)];
}

Complex SequenceTable::corner_combination(const LatticeBox& box) const {
  const int m = dim();
  Complex total{0.0, 0.0};
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    MultiIndex corner = box.hi;
    bool below = false;
    for (int p = 0; p < m; ++p) {
      if (mask & (1u << p)) {
        if (box.lo[p] == 0) {
          below = true;
          break;
        }
        corner[p] = box.lo[p] - 1;
      }
    }
    if (below) continue;
    const double sign = (__builtin_popcount(mask) % 2 == 0) ? 1.0 : -1.0;
    total += sign * grid_.data()[grid_.rank(corner)];
  }
  return total;
}

std::optional<std::int64_t> sequence_regular_check(const SequenceTable& table, double eps) {
  const int m = table.dim();
  const MultiIndex& h = table.horizon();
  const std::int64_t top = h.max_coord();

  // Stratum maxima over boxes grouped by max{k}.
  std::vector<double> strata(static_cast<std::size_t>(top + 1), 0.0);
  const LatticeBox full(MultiIndex::zeros(m), h);
  for_each_index(full, [&](const MultiIndex& k) {
    const std::int64_t t = k.max_coord();
    double& slot = strata[static_cast<std::size_t>(t)];
    const LatticeBox upper(k, h);
    for_each_index(upper, [&](const MultiIndex& l) {
      const double mag = std::abs(table.corner_combination(LatticeBox(k, l)));
      if (mag > slot) slot = mag;
    });
  });

  double worst_above = 0.0;
  std::optional<std::int64_t> best;
  for (std::int64_t t = top; t >= 0; --t) {
    worst_above = std::max(worst_above, strata[static_cast<std::size_t>(t)]);
    if (t == 0) break;
    // Candidate kappa_2 = t - 1 checks strata t..top.
    if (worst_above < eps) best = t - 1;
  }
  return best;
}

}  // namespace regconv
