#include "circlelab/counting.hpp"

#include <functional>
#include <unordered_map>

#include "circlelab/parallel.hpp"
#include "circlelab/rng.hpp"

namespace circlelab {

ScaledBox scale_box(const BoxRegion& box, const Rat& P) {
  ScaledBox sb;
  for (auto& [a, b] : box.bounds) {
    sb.lo.push_back((a * P).ceil());
    sb.hi.push_back((b * P).floor());
  }
  return sb;
}

namespace {

struct VecHash {
  size_t operator()(const std::vector<i64>& v) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (i64 x : v) h = splitmix64(h ^ std::uint64_t(x));
    return size_t(h);
  }
};

// Per-variable value tables for a group-separable polynomial list: each
// listed field variable contributes an additive value vector per assignment
// of its n coordinates. Enables incremental partial sums in enumerations.
struct GroupTables {
  bool ok = false;
  std::string offending;
  int np = 0;
  std::vector<i64> entries;            // per listed variable
  std::vector<std::vector<i64>> vals;  // per variable: entries * np
  std::vector<i64> consts;             // np
  i128 total = 0;                      // product of entries
};

GroupTables build_group_tables(const WeilSystem& ws, const ScaledBox& sb,
                               const std::vector<int>& vars, const std::vector<const PolyZ*>& polys) {
  GroupTables gt;
  gt.np = int(polys.size());
  gt.consts.assign(polys.size(), 0);
  int n = ws.n;

  std::vector<int> var_of(size_t(ws.ns()));
  for (int c = 0; c < ws.ns(); ++c) var_of[size_t(c)] = c / n;

  // Split every polynomial into per-variable parts.
  std::vector<std::vector<PolyZ>> parts(vars.size());
  std::vector<int> pos(size_t(ws.s), -1);
  for (size_t vi = 0; vi < vars.size(); ++vi) {
    pos[size_t(vars[vi])] = int(vi);
    parts[vi].assign(polys.size(), PolyZ(ws.ns()));
  }
  for (size_t pi = 0; pi < polys.size(); ++pi) {
    for (auto& term : polys[pi]->terms) {
      int group = -1;
      for (int c = 0; c < ws.ns(); ++c)
        if (term.e[c] > 0) {
          int g = var_of[size_t(c)];
          if (group == -1) group = g;
          else if (group != g) {
            gt.ok = false;
            gt.offending = "monomial mixing field variables";
            return gt;
          }
        }
      if (group == -1) {
        gt.consts[pi] = narrow(i128(gt.consts[pi]) + term.c, "group const");
      } else {
        if (pos[size_t(group)] < 0) {
          gt.ok = false;
          gt.offending = "monomial outside the listed variables";
          return gt;
        }
        parts[size_t(pos[size_t(group)])][pi].terms.push_back(term);
      }
    }
  }

  gt.total = 1;
  for (size_t vi = 0; vi < vars.size(); ++vi) {
    int v = vars[vi];
    i64 cnt = 1;
    for (int j = 0; j < n; ++j) {
      i64 w = sb.hi[size_t(v * n + j)] - sb.lo[size_t(v * n + j)] + 1;
      if (w <= 0) {
        gt.entries.push_back(0);
        gt.total = 0;
        gt.vals.emplace_back();
        cnt = 0;
        break;
      }
      cnt = narrow(i128(cnt) * w, "group entries");
    }
    if (cnt == 0) continue;
    gt.entries.push_back(cnt);
    gt.total *= cnt;
    std::vector<i64> table(size_t(cnt) * polys.size());
    std::vector<i64> x(size_t(ws.ns()), 0);
    for (int j = 0; j < n; ++j) x[size_t(v * n + j)] = sb.lo[size_t(v * n + j)];
    for (i64 e = 0; e < cnt; ++e) {
      for (size_t pi = 0; pi < polys.size(); ++pi)
        table[size_t(e) * polys.size() + pi] = narrow(eval_z(parts[vi][pi], x), "group value");
      int j = n - 1;
      while (j >= 0) {
        if (++x[size_t(v * n + j)] <= sb.hi[size_t(v * n + j)]) break;
        x[size_t(v * n + j)] = sb.lo[size_t(v * n + j)];
        --j;
      }
    }
    gt.vals.push_back(std::move(table));
  }
  gt.ok = true;
  return gt;
}

/// Depth-first enumeration over the variable tables with running partial
/// sums; calls sink(values) at every leaf. `first_entry` pins the outermost
/// variable to a single entry so callers can chunk deterministically.
template <class Sink>
void enumerate_tables(const GroupTables& gt, i64 first_entry, Sink&& sink) {
  int m = int(gt.entries.size());
  int np = gt.np;
  if (m == 0) {
    sink(std::span<const i64>(gt.consts));
    return;
  }
  std::vector<i64> idx(size_t(m), 0);
  std::vector<i64> partial(size_t(m + 1) * np);
  for (int pi = 0; pi < np; ++pi) partial[size_t(pi)] = gt.consts[size_t(pi)];
  idx[0] = first_entry;

  int depth = 0;
  while (true) {
    // fill partial sums down to the leaf
    while (depth < m) {
      const i64* row = &gt.vals[size_t(depth)][size_t(idx[size_t(depth)]) * np];
      const i64* prev = &partial[size_t(depth) * np];
      i64* cur = &partial[size_t(depth + 1) * np];
      for (int pi = 0; pi < np; ++pi) cur[pi] = prev[pi] + row[pi];
      ++depth;
    }
    sink(std::span<const i64>(&partial[size_t(m) * np], size_t(np)));
    // advance odometer (variable 0 fixed to first_entry)
    int d = m - 1;
    while (d >= 1) {
      if (++idx[size_t(d)] < gt.entries[size_t(d)]) break;
      idx[size_t(d)] = 0;
      --d;
    }
    if (d < 1) break;
    depth = d;
  }
}

std::pair<i128, i128> value_range(const GroupTables& gt, size_t pi) {
  i128 lo = gt.consts[pi], hi = gt.consts[pi];
  for (size_t vi = 0; vi < gt.vals.size(); ++vi) {
    i64 mn = INT64_MAX, mx = INT64_MIN;
    for (i64 e = 0; e < gt.entries[vi]; ++e) {
      i64 v = gt.vals[vi][size_t(e) * gt.np + pi];
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    lo += mn;
    hi += mx;
  }
  return {lo, hi};
}

// Fallback: plain coordinate enumeration (no separability assumptions).
template <class Sink>
void enumerate_plain(const WeilSystem& ws, const ScaledBox& sb, const std::vector<int>& vars,
                     const std::vector<const PolyZ*>& polys, Sink&& sink) {
  std::vector<int> coords;
  for (int v : vars)
    for (int j = 0; j < ws.n; ++j) coords.push_back(v * ws.n + j);
  std::vector<i64> x(size_t(ws.ns()), 0);
  for (int c = 0; c < ws.ns(); ++c) x[size_t(c)] = sb.lo[size_t(c)];
  for (int c : coords)
    if (sb.hi[size_t(c)] < sb.lo[size_t(c)]) return;
  std::vector<i64> vals(polys.size());
  while (true) {
    for (size_t pi = 0; pi < polys.size(); ++pi) vals[pi] = narrow(eval_z(*polys[pi], x), "plain value");
    sink(std::span<const i64>(vals));
    size_t k = coords.size();
    while (k > 0) {
      int c = coords[k - 1];
      if (++x[size_t(c)] <= sb.hi[size_t(c)]) break;
      x[size_t(c)] = sb.lo[size_t(c)];
      --k;
    }
    if (k == 0) break;
  }
}

}  // namespace

i64 count_direct(const CountJob& job) {
  const WeilSystem& ws = *job.ws;
  ScaledBox sb = scale_box(job.box, job.P);
  if (int(sb.lo.size()) != ws.ns()) throw std::invalid_argument("box dimension mismatch");
  i128 total = sb.points();
  if (total == 0) return 0;
  if (total > i128(job.budget))
    throw std::runtime_error("count_direct budget exceeded; use the mitm engine or lower P");

  std::vector<int> vars(size_t(ws.s));
  for (int v = 0; v < ws.s; ++v) vars[size_t(v)] = v;
  std::vector<const PolyZ*> polys;
  for (auto& p : ws.star) polys.push_back(&p);

  GroupTables gt = build_group_tables(ws, sb, vars, polys);
  if (gt.ok && gt.total > 0) {
    i64 chunks = gt.entries[0];
    std::vector<i64> partial(size_t(chunks), 0);
    run_chunks(chunks, job.threads, [&](long long chunk) {
      i64 cnt = 0;
      enumerate_tables(gt, chunk, [&](std::span<const i64> vals) {
        for (i64 v : vals)
          if (v != 0) return;
        ++cnt;
      });
      partial[size_t(chunk)] = cnt;
    });
    i128 sum = 0;
    for (i64 c : partial) sum += c;
    return narrow(sum, "count_direct");
  }

  i64 cnt = 0;
  enumerate_plain(ws, sb, vars, polys, [&](std::span<const i64> vals) {
    for (i64 v : vals)
      if (v != 0) return;
    ++cnt;
  });
  return cnt;
}

i64 count_mitm(const CountJob& job) {
  const WeilSystem& ws = *job.ws;
  int n = ws.n, s = ws.s;
  ScaledBox sb = scale_box(job.box, job.P);
  if (int(sb.lo.size()) != ws.ns()) throw std::invalid_argument("box dimension mismatch");

  std::vector<int> left, right;
  if (job.split) {
    left = job.split->first;
    right = job.split->second;
    std::vector<bool> seen(size_t(s), false);
    for (int v : left) seen.at(size_t(v)) = true;
    for (int v : right) {
      if (seen.at(size_t(v))) throw std::invalid_argument("mitm split is not a partition");
      seen[size_t(v)] = true;
    }
    for (bool b : seen)
      if (!b) throw std::invalid_argument("mitm split is not a partition");
  } else {
    for (int v = 0; v < s; ++v) (v < (s + 1) / 2 ? left : right).push_back(v);
  }
  std::vector<bool> in_left(size_t(s), false);
  for (int v : left) in_left[size_t(v)] = true;

  // Side split of every star polynomial; any monomial with variables on both
  // sides breaks the engine.
  size_t np = ws.star.size();
  std::vector<PolyZ> lpoly(np, PolyZ(ws.ns())), rpoly(np, PolyZ(ws.ns()));
  std::vector<i64> cpoly(np, 0);
  for (size_t pi = 0; pi < np; ++pi) {
    for (auto& term : ws.star[pi].terms) {
      int side = -1;
      for (int c = 0; c < ws.ns(); ++c)
        if (term.e[c] > 0) {
          int sd = in_left[size_t(c / n)] ? 0 : 1;
          if (side == -1) side = sd;
          else if (side != sd) {
            std::string mono = "1";
            for (int w = 0; w < ws.ns(); ++w)
              if (term.e[w] > 0)
                mono += " X" + std::to_string(w + 1) +
                        (term.e[w] > 1 ? "^" + std::to_string(term.e[w]) : "");
            throw std::runtime_error("system is not separable over the mitm split; monomial" + mono +
                                     " mixes both sides");
          }
        }
      if (side == -1) cpoly[pi] = narrow(i128(cpoly[pi]) + term.c, "mitm const");
      else if (side == 0) lpoly[pi].terms.push_back(term);
      else rpoly[pi].terms.push_back(term);
    }
  }

  std::vector<const PolyZ*> lp, rp;
  for (auto& p : lpoly) lp.push_back(&p);
  for (auto& p : rpoly) rp.push_back(&p);

  GroupTables lt = build_group_tables(ws, sb, left, lp);
  GroupTables rt = build_group_tables(ws, sb, right, rp);
  i128 lpoints = 1, rpoints = 1;
  for (int v : left)
    for (int j = 0; j < n; ++j)
      lpoints *= std::max<i64>(0, sb.hi[size_t(v * n + j)] - sb.lo[size_t(v * n + j)] + 1);
  for (int v : right)
    for (int j = 0; j < n; ++j)
      rpoints *= std::max<i64>(0, sb.hi[size_t(v * n + j)] - sb.lo[size_t(v * n + j)] + 1);
  if (lpoints == 0 || rpoints == 0) return 0;
  if (lpoints > i128(job.budget) || rpoints > i128(job.budget))
    throw std::runtime_error("count_mitm budget exceeded");

  // Dense table when the joint left value range is small enough.
  bool dense_ok = lt.ok;
  std::vector<std::pair<i128, i128>> ranges(np);
  i128 cells = 1;
  if (lt.ok) {
    for (size_t pi = 0; pi < np && dense_ok; ++pi) {
      ranges[pi] = value_range(lt, pi);
      cells *= (ranges[pi].second - ranges[pi].first + 1);
      if (cells > (i128(1) << 26)) dense_ok = false;
    }
  }

  i128 matches = 0;
  if (dense_ok) {
    std::vector<i64> sizes(np);
    for (size_t pi = 0; pi < np; ++pi) sizes[pi] = narrow(ranges[pi].second - ranges[pi].first + 1, "mitm cells");
    auto flatten = [&](std::span<const i64> vals, bool) -> i64 {
      i128 idx = 0;
      for (size_t pi = 0; pi < np; ++pi) {
        i128 val = vals[pi];
        if (val < ranges[pi].first || val > ranges[pi].second) return -1;
        idx = idx * sizes[pi] + (val - ranges[pi].first);
      }
      return i64(idx);
    };

    std::vector<i64> table(size_t(cells), 0);
    {
      i64 chunks = lt.entries.empty() ? 1 : lt.entries[0];
      std::vector<std::vector<i64>> chunk_tables;
      int threads = job.threads <= 0 ? int(std::thread::hardware_concurrency()) : job.threads;
      bool parallel_fill = chunks > 1 && threads > 1 && size_t(cells) * size_t(std::min<i64>(threads, chunks)) < (size_t(1) << 28);
      if (parallel_fill) {
        std::vector<std::vector<i64>> partials(size_t(chunks));
        run_chunks(chunks, job.threads, [&](long long chunk) {
          std::vector<i64> local(size_t(cells), 0);
          enumerate_tables(lt, chunk, [&](std::span<const i64> vals) {
            local[size_t(flatten(vals, false))] += 1;
          });
          partials[size_t(chunk)] = std::move(local);
        });
        for (auto& part : partials)
          for (size_t i = 0; i < size_t(cells); ++i) table[i] += part[i];
      } else {
        for (i64 chunk = 0; chunk < std::max<i64>(chunks, 1); ++chunk)
          enumerate_tables(lt, chunk, [&](std::span<const i64> vals) {
            table[size_t(flatten(vals, false))] += 1;
          });
      }
    }

    auto match_vals = [&](std::span<const i64> vals) {
      // want = -(right + const); the const already lives in rt.consts via
      // build_group_tables, so vals includes it.
      i64 idx;
      {
        i128 id = 0;
        bool okr = true;
        for (size_t pi = 0; pi < np; ++pi) {
          i128 val = -(i128(vals[pi]) + cpoly[pi]);
          if (val < ranges[pi].first || val > ranges[pi].second) {
            okr = false;
            break;
          }
          id = id * sizes[pi] + (val - ranges[pi].first);
        }
        idx = okr ? i64(id) : -1;
      }
      if (idx >= 0) matches += table[size_t(idx)];
    };
    if (rt.ok) {
      i64 chunks = rt.entries.empty() ? 1 : rt.entries[0];
      for (i64 chunk = 0; chunk < std::max<i64>(chunks, 1); ++chunk)
        enumerate_tables(rt, chunk, match_vals);
    } else {
      enumerate_plain(ws, sb, right, rp, match_vals);
    }
  } else {
    std::unordered_map<std::vector<i64>, i64, VecHash> table;
    auto fill = [&](std::span<const i64> vals) {
      table[std::vector<i64>(vals.begin(), vals.end())] += 1;
    };
    if (lt.ok) {
      i64 chunks = lt.entries.empty() ? 1 : lt.entries[0];
      for (i64 chunk = 0; chunk < std::max<i64>(chunks, 1); ++chunk) enumerate_tables(lt, chunk, fill);
    } else {
      enumerate_plain(ws, sb, left, lp, fill);
    }
    auto match = [&](std::span<const i64> vals) {
      std::vector<i64> key(np);
      for (size_t pi = 0; pi < np; ++pi) key[pi] = narrow(-(i128(vals[pi]) + cpoly[pi]), "mitm key");
      auto it = table.find(key);
      if (it != table.end()) matches += it->second;
    };
    if (rt.ok) {
      i64 chunks = rt.entries.empty() ? 1 : rt.entries[0];
      for (i64 chunk = 0; chunk < std::max<i64>(chunks, 1); ++chunk) enumerate_tables(rt, chunk, match);
    } else {
      enumerate_plain(ws, sb, right, rp, match);
    }
  }
  return narrow(matches, "count_mitm");
}

i64 count_singular_multilinear(const NumberField& K, const PolySystem& sys, int d, const Rat& P,
                               i64 budget) {
  if (d < 2) throw std::invalid_argument("the polar-rank locus needs d >= 2");
  if (sys.t[d] == 0) throw std::invalid_argument("degree d is not present in the system");
  int td = sys.t[d], s = sys.s, n = K.n;
  i64 bound = P.floor();
  i64 side = 2 * std::max<i64>(bound, 0) + 1;
  int tuple_coords = n * s * (d - 1);
  double total = std::pow(double(side), tuple_coords);
  if (total > double(budget)) throw std::runtime_error("singular-multilinear enumeration budget exceeded");

  std::vector<std::vector<Elem>> vbasis(size_t(s), std::vector<Elem>(size_t(s), Elem(n)));
  for (int j = 0; j < s; ++j) vbasis[size_t(j)][size_t(j)] = K.one();

  std::vector<i64> x(size_t(tuple_coords), -bound);
  i64 count = 0;
  while (true) {
    std::vector<std::vector<Elem>> slots(size_t(d - 1), std::vector<Elem>(size_t(s), Elem(n)));
    for (int t = 0; t < d - 1; ++t)
      for (int v = 0; v < s; ++v)
        for (int j = 0; j < n; ++j) slots[size_t(t)][size_t(v)].c[j] = Rat(x[size_t((t * s + v) * n + j)]);

    std::vector<std::vector<Elem>> mat(size_t(td), std::vector<Elem>(size_t(s), Elem(n)));
    for (int i = 0; i < td; ++i)
      for (int j = 0; j < s; ++j) {
        std::vector<std::vector<Elem>> full = slots;
        full.push_back(vbasis[size_t(j)]);
        mat[size_t(i)][size_t(j)] = polar_eval(K, sys.forms[d][i], full);
      }
    int rank = 0;
    for (int col = 0; col < s && rank < td; ++col) {
      int piv = -1;
      for (int i = rank; i < td; ++i)
        if (!mat[size_t(i)][size_t(col)].is_zero()) { piv = i; break; }
      if (piv < 0) continue;
      std::swap(mat[size_t(piv)], mat[size_t(rank)]);
      Elem inv = element_inv(K, mat[size_t(rank)][size_t(col)]);
      for (int j = 0; j < s; ++j) mat[size_t(rank)][size_t(j)] = element_mul(K, mat[size_t(rank)][size_t(j)], inv);
      for (int i = 0; i < td; ++i) {
        if (i == rank || mat[size_t(i)][size_t(col)].is_zero()) continue;
        Elem f = mat[size_t(i)][size_t(col)];
        for (int j = 0; j < s; ++j)
          mat[size_t(i)][size_t(j)] = sub(mat[size_t(i)][size_t(j)], element_mul(K, f, mat[size_t(rank)][size_t(j)]));
      }
      ++rank;
    }
    if (rank < td) ++count;

    int j = tuple_coords - 1;
    while (j >= 0) {
      if (++x[size_t(j)] <= bound) break;
      x[size_t(j)] = -bound;
      --j;
    }
    if (j < 0) break;
  }
  return count;
}

}  // namespace circlelab
