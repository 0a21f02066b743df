#include "foam/auction.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "foam/errors.hpp"

namespace foam {

void AuctionParams::validate() const {
  if (!(eps_min > 0.0)) throw ParamError("auction eps_min must be > 0");
  if (!(eps0 > 0.0)) throw ParamError("auction eps0 must be > 0");
  if (!(alpha > 1.0)) throw ParamError("auction alpha must be > 1");
}

std::int64_t VolumeTargets::total() const {
  std::int64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

void VolumeTargets::validate(std::int64_t n_cells) const {
  if (counts.size() < 2)
    throw ParamError("volume targets need at least two phases");
  for (auto c : counts)
    if (c < 0) throw ParamError("volume targets must be non-negative");
  if (total() != n_cells)
    throw ParamError("volume targets must sum to the cell count");
}

VolumeTargets VolumeTargets::from_volumes(
    const Grid& g, std::span<const double> bubble_volumes) {
  const double hv = g.cell_volume();
  const std::int64_t n_cells = g.cell_count();
  double ideal_total = 0.0;
  for (double v : bubble_volumes) {
    if (!(v > 0.0)) throw ParamError("bubble volumes must be > 0");
    ideal_total += v / hv;
  }
  const std::int64_t bubble_total = std::llround(ideal_total);
  if (bubble_total >= n_cells)
    throw ParamError("bubble volumes exceed the domain");

  const size_t n = bubble_volumes.size();
  std::vector<std::int64_t> counts(n + 1, 0);
  std::vector<std::pair<double, size_t>> remainders(n);
  std::int64_t assigned = 0;
  for (size_t i = 0; i < n; ++i) {
    double ideal = bubble_volumes[i] / hv;
    counts[i] = std::int64_t(std::floor(ideal));
    remainders[i] = {-(ideal - std::floor(ideal)), i};  // largest first
    assigned += counts[i];
  }
  std::sort(remainders.begin(), remainders.end());
  for (size_t k = 0; assigned < bubble_total; ++k, ++assigned)
    ++counts[remainders[k % n].second];
  counts[n] = n_cells - bubble_total;
  return VolumeTargets{std::move(counts)};
}

std::vector<double> epsilon_schedule(const AuctionParams& params,
                                     std::int64_t n_cells) {
  params.validate();
  const double eps_bar = params.eps_bar(n_cells);
  std::vector<double> seq{params.eps0};
  while (seq.back() >= eps_bar) seq.push_back(seq.back() / params.alpha);
  return seq;
}

namespace {

constexpr std::int32_t kUnassigned = -1;

// Min-heap of (stored bid, cell); ties evict the lowest cell index.
using Bid = std::pair<double, std::int64_t>;
using Heap = std::vector<Bid>;

struct CellChoice {
  double v = 0.0, w = 0.0;   // best and second-best Phi_p - lambda_p
  std::int32_t best = -1, second = -1;
  std::uint64_t version = 0;
};

std::string dump_state(double eps, int round, std::int64_t queued,
                       std::uint64_t bids, const std::vector<double>& lambda) {
  std::ostringstream os;
  os << "auction bid cap exceeded: round=" << round << " eps=" << eps
     << " unassigned=" << queued << " bids=" << bids << " lambda=[";
  for (size_t p = 0; p < lambda.size(); ++p)
    os << (p ? "," : "") << lambda[p];
  os << "]";
  return os.str();
}

}  // namespace

AuctionResult assign(const ScoreField& scores, const VolumeTargets& targets,
                     const AuctionParams& params) {
  params.validate();
  const std::int64_t n = scores.geom.cell_count();
  const int np = scores.n_phases;
  if (np != targets.n_phases())
    throw ParamError("targets and scores disagree on phase count");
  targets.validate(n);

  AuctionResult res;
  res.lambda.assign(size_t(np), 0.0);
  res.labels.geom = scores.geom;
  res.labels.n_phases = np;
  res.labels.labels.assign(size_t(n), 0);

  std::vector<std::int32_t> eligible;
  for (int p = 0; p < np; ++p)
    if (targets.counts[size_t(p)] > 0) eligible.push_back(p);

  if (eligible.size() == 1) {
    std::fill(res.labels.labels.begin(), res.labels.labels.end(),
              std::uint16_t(eligible[0]));
    res.eps_final = epsilon_schedule(params, n).back();
    return res;
  }

  // Cell-major copy of the scores for the per-cell argmax scans.
  std::vector<double> sc(size_t(n) * np);
  for (int p = 0; p < np; ++p) {
    auto src = scores.phase(p);
    for (std::int64_t x = 0; x < n; ++x) {
      double s = src[size_t(x)];
      if (!std::isfinite(s)) throw ParamError("auction scores must be finite");
      sc[size_t(x) * np + p] = s;
    }
  }

  auto& lambda = res.lambda;
  std::uint64_t lambda_version = 1;
  std::vector<CellChoice> cache{size_t(n)};

  std::vector<Heap> heaps{size_t(np)};
  for (int p = 0; p < np; ++p)
    heaps[size_t(p)].reserve(size_t(targets.counts[size_t(p)]));
  std::vector<std::int32_t> assignment(size_t(n), kUnassigned);

  // FIFO of unassigned cells; every unassigned cell is queued exactly once,
  // so a ring of n+1 slots never overflows.
  std::vector<std::int64_t> ring(size_t(n + 1), 0);
  std::int64_t head = 0, tail = 0, queued = 0;
  auto push_cell = [&](std::int64_t x) {
    ring[size_t(tail)] = x;
    tail = (tail + 1) % (n + 1);
    ++queued;
  };
  auto pop_cell = [&]() {
    std::int64_t x = ring[size_t(head)];
    head = (head + 1) % (n + 1);
    --queued;
    return x;
  };

  const auto schedule = epsilon_schedule(params, n);
  const std::uint64_t cap = params.bid_round_cap
                                ? params.bid_round_cap
                                : std::max<std::uint64_t>(1'000'000, 500 * n);
  const bool post_eviction =
      params.lambda_update == AuctionParams::LambdaUpdate::PostEviction;

  for (size_t round = 0; round < schedule.size(); ++round) {
    const double eps = schedule[round];
    for (auto& h : heaps) h.clear();
    std::fill(assignment.begin(), assignment.end(), kUnassigned);
    head = tail = queued = 0;
    for (std::int64_t x = 0; x < n; ++x) push_cell(x);

    std::uint64_t bids = 0;
    while (queued > 0) {
      const std::int64_t x = pop_cell();
      if (++bids > cap)
        throw ConvergenceError(
            dump_state(eps, int(round), queued, bids, lambda));

      CellChoice& ch = cache[size_t(x)];
      if (ch.version != lambda_version) {
        const double* row = sc.data() + size_t(x) * np;
        double v = -std::numeric_limits<double>::infinity();
        double w = v;
        std::int32_t best = -1, second = -1;
        for (std::int32_t p : eligible) {
          const double profit = row[p] - lambda[size_t(p)];
          if (profit > v) {
            w = v;
            second = best;
            v = profit;
            best = p;
          } else if (profit > w) {
            w = profit;
            second = p;
          }
        }
        ch = {v, w, best, second, lambda_version};
      }

      const int target = ch.best;
      const double bid = lambda[size_t(target)] + eps + (ch.v - ch.w);
      Heap& h = heaps[size_t(target)];
      const std::int64_t quota = targets.counts[size_t(target)];

      if (std::int64_t(h.size()) == quota) {
        std::pop_heap(h.begin(), h.end(), std::greater<>{});
        const Bid evicted = h.back();
        h.back() = {bid, x};
        std::push_heap(h.begin(), h.end(), std::greater<>{});
        assignment[size_t(evicted.second)] = kUnassigned;
        push_cell(evicted.second);
        assignment[size_t(x)] = target;
        // The standard reading keeps lambda equal to the member minimum and
        // is provably non-decreasing within a round; the pre-eviction
        // reading lags one event behind and may transiently dip.
        const double next = post_eviction ? h.front().first : evicted.first;
        if (post_eviction && next < lambda[size_t(target)])
          throw Error("auction price decreased within a round");
        lambda[size_t(target)] = next;
        ++lambda_version;
      } else {
        h.emplace_back(bid, x);
        std::push_heap(h.begin(), h.end(), std::greater<>{});
        assignment[size_t(x)] = target;
        if (std::int64_t(h.size()) == quota) {
          if (h.front().first < lambda[size_t(target)])
            throw Error("auction price decreased within a round");
          lambda[size_t(target)] = h.front().first;
          ++lambda_version;
        }
      }
    }
    res.total_bids += bids;
    res.eps_final = eps;
  }
  res.rounds = int(schedule.size());

  for (std::int64_t x = 0; x < n; ++x)
    res.labels.labels[size_t(x)] = std::uint16_t(assignment[size_t(x)]);
  return res;
}

}  // namespace foam
