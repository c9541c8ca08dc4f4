#include <gtest/gtest.h>

#include <fstream>

#include "fixtures.hpp"
#include "flowscope/error.hpp"
#include "flowscope/ingest.hpp"

namespace flowscope {
namespace {

namespace fs = std::filesystem;
using namespace flowscope::testing;

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

constexpr const char* kBuilders = "address,builder_id,name\n0x00000000000000000000000000000000000003e9,b1,One\n";
const std::string kBlock1 =
    R"({"number":1,"timestamp":1700000000,"fee_recipient":"0x00000000000000000000000000000000000003e9","bid":"100"})"
    "\n";

std::string tx_line(int hash, int block, int index, const std::string& extra = "") {
  char h[65];
  std::snprintf(h, sizeof h, "%064x", hash);
  return std::string(R"({"hash":"0x)") + h + R"(","block":)" + std::to_string(block) + R"(,"index":)" +
         std::to_string(index) +
         R"(,"from":"0x0000000000000000000000000000000000000001","to":"0x0000000000000000000000000000000000000002","gas_used":21000,"priority_tip":"5","swap_count":1)" +
         extra + "}\n";
}

struct Files {
  fs::path dir;
  explicit Files(std::string_view name) : dir(scratch(name)) {
    write(dir / "builders.csv", kBuilders);
    write(dir / "blocks.jsonl", kBlock1);
    write(dir / "txs.jsonl", "");
    write(dir / "swaps.jsonl", "");
  }
  Dataset load() const { return load_dataset(DatasetPaths::in_directory(dir), dir / "builders.csv"); }
};

std::string schema_field(const Files& f) {
  try {
    f.load();
  } catch (const SchemaError& e) {
    return e.field();
  }
  return "<no error>";
}

TEST(Ingest, EmptyInputsGiveAnEmptyDataset) {
  Files f("ingest-empty");
  write(f.dir / "blocks.jsonl", "");
  const auto ds = f.load();
  EXPECT_TRUE(ds.blocks().empty());
  EXPECT_TRUE(ds.txs().empty());
  EXPECT_TRUE(ds.contracts().empty());
}

TEST(Ingest, DuplicateIndexInBlockIsRejected) {
  Files f("ingest-dup-index");
  write(f.dir / "txs.jsonl", tx_line(1, 1, 0) + tx_line(2, 1, 0));
  EXPECT_EQ(schema_field(f), "index");
}

TEST(Ingest, DuplicateHashIsRejected) {
  Files f("ingest-dup-hash");
  write(f.dir / "txs.jsonl", tx_line(1, 1, 0) + tx_line(1, 1, 1));
  EXPECT_EQ(schema_field(f), "hash");
}

TEST(Ingest, SchemaViolationsNameTheField) {
  {
    Files f("ingest-gas");
    auto line = tx_line(1, 1, 0);
    line.replace(line.find("21000"), 5, "0");
    write(f.dir / "txs.jsonl", line);
    EXPECT_EQ(schema_field(f), "gas_used");
  }
  {
    Files f("ingest-block");
    write(f.dir / "txs.jsonl", tx_line(1, 7, 0));
    EXPECT_EQ(schema_field(f), "block");
  }
  {
    Files f("ingest-bid");
    std::string b = kBlock1;
    b.replace(b.find("\"100\""), 5, "\"-1\"");
    write(f.dir / "blocks.jsonl", b);
    EXPECT_EQ(schema_field(f), "bid");
  }
  {
    Files f("ingest-order");
    write(f.dir / "blocks.jsonl", kBlock1 + kBlock1);
    EXPECT_EQ(schema_field(f), "number");
  }
  {
    Files f("ingest-missing");
    write(f.dir / "txs.jsonl", R"({"hash":"0x01"})" "\n");
    EXPECT_NE(schema_field(f), "<no error>");
  }
  {
    Files f("ingest-json");
    write(f.dir / "txs.jsonl", "{not json\n");
    EXPECT_THROW(f.load(), SchemaError);
  }
}

TEST(Ingest, SchemaErrorsReportTheLine) {
  Files f("ingest-line");
  write(f.dir / "txs.jsonl", tx_line(1, 1, 0) + "\n" + tx_line(2, 9, 1));
  try {
    f.load();
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.file(), "txs.jsonl");
  }
}

TEST(Ingest, DanglingSwapReference) {
  Files f("ingest-dangling");
  write(f.dir / "txs.jsonl", tx_line(1, 1, 0));
  write(f.dir / "swaps.jsonl",
        R"({"tx":"0x00000000000000000000000000000000000000000000000000000000000000ff","pool":"0x0000000000000000000000000000000000000003","token_in":"0x0000000000000000000000000000000000000004","token_out":"0x0000000000000000000000000000000000000005","amount_usd":1.5})"
        "\n");
  try {
    f.load();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.qualified_code(), "ingest.DanglingReference");
  }
}

TEST(Ingest, MissingFile) {
  Files f("ingest-missing-file");
  fs::remove(f.dir / "swaps.jsonl");
  try {
    f.load();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.qualified_code(), "ingest.MissingFile");
  }
}

TEST(Ingest, WeiAcceptsIntegersAndStrings) {
  Files f("ingest-wei");
  write(f.dir / "txs.jsonl", tx_line(1, 1, 0, R"(,"direct_bribe":-3)") + tx_line(2, 1, 1, R"(,"direct_bribe":"1000000000000000000000")"));
  const auto ds = f.load();
  EXPECT_EQ(ds.txs()[0].bribe(), Wei{2});
  EXPECT_EQ(ds.txs()[1].direct_bribe.str(), "1000000000000000000000");
}

TEST(BuilderRegistry, UnknownAddressesResolveToProposer) {
  const std::vector<BuilderRegistry::Entry> entries = {
      {addr(1), "beaver", "beaverbuild"}, {addr(2), "beaver", "beaverbuild"}, {addr(3), "titan", "Titan"}};
  const BuilderRegistry r(entries);
  EXPECT_EQ(r.resolve(addr(1)), r.resolve(addr(2)));
  EXPECT_NE(r.resolve(addr(1)), r.resolve(addr(3)));
  EXPECT_EQ(r.resolve(addr(99)), kProposer);
  EXPECT_EQ(r.id(kProposer), "proposer");
  EXPECT_EQ(r.size(), 3u);
  EXPECT_EQ(r.address_count(), 3u);
}

TEST(BuilderRegistry, AddressOwnedByTwoBuildersIsRejected) {
  const std::vector<BuilderRegistry::Entry> entries = {{addr(1), "a", ""}, {addr(1), "b", ""}};
  EXPECT_THROW(BuilderRegistry{entries}, SchemaError);
  const std::vector<BuilderRegistry::Entry> reserved = {{addr(1), "proposer", ""}};
  EXPECT_THROW(BuilderRegistry{reserved}, SchemaError);
}

TEST(LabelSet, ParsesOptionalColumns) {
  const auto dir = scratch("labels");
  write(dir / "labels.csv",
        "contract,mechanism,known_eof,source\n"
        "0x0000000000000000000000000000000000000001,non_atomic,true,manual\n"
        "0x0000000000000000000000000000000000000002,atomic,,heuristic\n"
        "0x0000000000000000000000000000000000000003,protocol,false\n");
  const auto labels = LabelSet::load(dir / "labels.csv");
  ASSERT_EQ(labels.size(), 3u);
  EXPECT_EQ(labels.find(addr(1))->known_eof, true);
  EXPECT_FALSE(labels.find(addr(2))->known_eof.has_value());
  EXPECT_EQ(labels.find(addr(2))->source, LabelSource::heuristic);
  EXPECT_EQ(labels.manual_mechanism(addr(2)), Mechanism::unlabeled);
  EXPECT_EQ(labels.manual_mechanism(addr(3)), Mechanism::protocol);
  EXPECT_EQ(labels.find(addr(4)), nullptr);

  write(dir / "dup.csv",
        "0x0000000000000000000000000000000000000001,atomic,\n0x0000000000000000000000000000000000000001,other,\n");
  EXPECT_THROW(LabelSet::load(dir / "dup.csv"), SchemaError);
}

TEST(Visibility, PrivateIffAbsentFromMempool) {
  DatasetBuilder b;
  b.block(1, 100, 1);
  const auto h1 = b.tx(1, addr(50), gwei(1)).hash;
  const auto h2 = b.tx(1, addr(50), gwei(1)).hash;
  const auto ds = b.build();

  const auto marked = mark_visibility(ds, std::set<TxHash>{h1, txhash(999)});
  for (const auto& tx : marked.txs()) EXPECT_EQ(tx.is_private, tx.hash == h2);

  const auto none = mark_visibility(ds, std::set<TxHash>{});
  for (const auto& tx : none.txs()) EXPECT_TRUE(tx.is_private);
}

TEST(Ingest, FixtureCountsMatchManifest) {
  const auto& ds = fixture_dataset("standard");
  const auto& m = fixture_manifest("standard");
  EXPECT_EQ(ds.blocks().size(), m.blocks);
  EXPECT_EQ(ds.txs().size(), m.txs);
  EXPECT_EQ(ds.swaps().size(), m.swaps);
  const auto priv = std::count_if(ds.txs().begin(), ds.txs().end(), [](const TxRecord& t) { return t.is_private; });
  EXPECT_EQ(static_cast<std::uint64_t>(priv), m.private_txs);
}

TEST(Ingest, LoadingTwiceIsByteIdentical) {
  const auto& dir = fixture_dir("standard");
  EXPECT_EQ(load_directory(dir).digest(), load_directory(dir).digest());
  EXPECT_EQ(load_directory(dir).digest(), fixture_dataset("standard").digest());
}

TEST(Ingest, InputOrderDoesNotChangeTheDataset) {
  DatasetBuilder b;
  b.block(1, 100, 1).block(2, 112, 2);
  b.tx(1, addr(50), gwei(1));
  b.tx(2, addr(51), gwei(2));
  b.tx(1, addr(52), gwei(3));
  const auto forward = b.build();
  std::reverse(b.txs().begin(), b.txs().end());
  std::reverse(b.blocks().begin(), b.blocks().end());
  EXPECT_EQ(b.build().digest(), forward.digest());
}

TEST(Ingest, IndexIntegrity) {
  const auto& ds = fixture_dataset("standard");
  std::size_t total = 0;
  for (std::size_t b = 0; b < ds.blocks().size(); ++b) {
    for (const auto& tx : ds.block_txs(b)) EXPECT_EQ(tx.block_number, ds.blocks()[b].number);
    total += ds.block_txs(b).size();
  }
  EXPECT_EQ(total, ds.txs().size());

  std::size_t by_contract = 0;
  for (const auto& c : ds.contracts()) {
    for (auto pos : ds.contract_txs(c)) EXPECT_EQ(ds.txs()[pos].destination, c);
    by_contract += ds.contract_txs(c).size();
  }
  EXPECT_EQ(by_contract, ds.txs().size());

  std::size_t swaps = 0;
  for (std::size_t t = 0; t < ds.txs().size(); ++t) {
    for (auto s : ds.tx_swaps(t)) EXPECT_EQ(ds.swaps()[s].tx, ds.txs()[t].hash);
    swaps += ds.tx_swaps(t).size();
  }
  EXPECT_EQ(swaps, ds.swaps().size());
}

TEST(Ingest, EveryFeeRecipientResolves) {
  const auto& ds = fixture_dataset("standard");
  for (const auto& b : ds.blocks()) {
    EXPECT_LT(b.builder, ds.registry().size());
    EXPECT_EQ(b.builder, ds.registry().resolve(b.fee_recipient));
  }
}

}  // namespace
}  // namespace flowscope
