#include "flowscope/dependency.hpp"

#include <limits>

#include "flowscope/error.hpp"
#include "flowscope/parallel.hpp"

namespace flowscope {

std::string_view to_string(EdrBin bin) noexcept {
  switch (bin) {
    case EdrBin::negative: return "(-inf,0)";
    case EdrBin::below_half: return "[0,0.5)";
    case EdrBin::half_to_one: return "[0.5,1)";
    case EdrBin::one_to_ten: return "[1,10)";
    case EdrBin::ten_to_hundred: return "[10,100)";
    case EdrBin::hundred_plus: return "[100,+inf)";
  }
  return "?";
}

EdrBin edr_bin(Wei eof_bribe, Wei profit) noexcept {
  const auto e = eof_bribe.value();
  const auto p = profit.value();
  if (p < 0) return EdrBin::negative;
  if (p == 0) return e > 0 ? EdrBin::hundred_plus : EdrBin::below_half;
  if (2 * e < p) return EdrBin::below_half;
  if (e < p) return EdrBin::half_to_one;
  if (e < 10 * p) return EdrBin::one_to_ten;
  if (e < 100 * p) return EdrBin::ten_to_hundred;
  return EdrBin::hundred_plus;
}

EdrRecord edr_for_block(const BlockEconomics& economics, const std::set<Address>& eof_set, const Dataset& dataset) {
  const auto pos = dataset.block_position(economics.block_number);
  if (!pos) throw Error("dependency", Errc::UnknownBlock, "no block " + std::to_string(economics.block_number));

  EdrRecord r;
  r.block_number = economics.block_number;
  r.builder = economics.builder;
  r.profit = economics.profit;
  for (const auto& tx : dataset.block_txs(*pos)) {
    if (eof_set.contains(tx.destination)) r.eof_bribe += tx.bribe().positive_part();
  }
  if (r.profit.value() != 0) {
    r.edr = static_cast<double>(r.eof_bribe.ld() / r.profit.ld());
  } else {
    r.edr = r.eof_bribe.value() > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  r.bin = edr_bin(r.eof_bribe, r.profit);
  return r;
}

std::vector<EdrRecord> edr_for_all_blocks(const Dataset& dataset, const std::set<Address>& eof_set) {
  std::vector<EdrRecord> out(dataset.blocks().size());
  parallel_for(out.size(), [&](std::size_t b) {
    out[b] = edr_for_block(block_economics_at(dataset, b), eof_set, dataset);
  });
  return out;
}

namespace {

template <typename Pred>
EdrHistogram histogram(std::span<const EdrRecord> records, Pred&& keep) {
  std::array<std::size_t, kEdrBinCount> counts{};
  std::size_t n = 0;
  for (const auto& r : records) {
    if (!keep(r)) continue;
    ++counts[static_cast<std::size_t>(r.bin)];
    ++n;
  }
  EdrHistogram h{};
  if (n == 0) return h;
  for (std::size_t i = 0; i < kEdrBinCount; ++i) h[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
  return h;
}

}  // namespace

EdrHistogram edr_histogram(std::span<const EdrRecord> records, BuilderId builder) {
  bool any = false;
  for (const auto& r : records) any = any || r.builder == builder;
  if (!any) throw Error("dependency", Errc::NoBlocks, "builder " + std::to_string(builder) + " has no blocks");
  return histogram(records, [builder](const EdrRecord& r) { return r.builder == builder; });
}

EdrHistogram edr_histogram_pooled(std::span<const EdrRecord> records) {
  if (records.empty()) throw Error("dependency", Errc::NoBlocks, "no blocks");
  return histogram(records, [](const EdrRecord&) { return true; });
}

}  // namespace flowscope
