// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

#include "fndstack/backbone.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include <gtest/gtest.h>

#include "fndstack/error.hpp"
#include "support.hpp"

namespace fndstack::backbone {
namespace {

using fndstack::testing::TempDir;

// Hand-assembled bytes of a two-record, 2-d text store named "golden".
const std::vector<std::uint8_t> kGolden = {
    'S', 'F', 'N', 'D',                              // magic
    0x01, 0x00,                                      // version 1
    0x00,                                            // text
    0x02, 0x00, 0x00, 0x00,                          // dim 2
    0x02, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,  // 2 records
    0x06, 0x00, 'g', 'o', 'l', 'd', 'e', 'n',        // name
    0x01, 0x00, 'a',                                 // id "a"
    0x00, 0x00, 0x80, 0x3f,                          // 1.0f
    0x00, 0x00, 0x20, 0xc0,                          // -2.5f
    0x01, 0x00, 'b',                                 // id "b"
    0x00, 0x00, 0x00, 0x3f,                          // 0.5f
    0x00, 0x00, 0x00, 0x00,                          // 0.0f
};

EmbeddingStore golden_store() {
  EmbeddingStore s(BackboneDescriptor{"golden", Modality::Text, 2, 0, Provenance::Mock});
  s.add("a", std::vector<float>{1.0f, -2.5f});
  s.add("b", std::vector<float>{0.5f, 0.0f});
  return s;
}

ErrorCode decode_error(const std::vector<std::uint8_t>& bytes) {
  try {
    decode_store(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "decode succeeded";
  return ErrorCode::InvalidArgument;
}

TEST(StoreFormat, GoldenBytesArePinned) {
  EXPECT_EQ(encode_store(golden_store()), kGolden);
  const auto back = decode_store(kGolden);
  EXPECT_TRUE(back.same_content(golden_store()));
  EXPECT_EQ(back.descriptor().provenance, Provenance::Mock);
}

TEST(StoreFormat, FileRoundTripIsBitExact) {
  TempDir dir("store");
  auto m = testing::mock_manifest(50, 3);
  auto s = mock_store(testing::mock_descriptor("rt", Modality::Image, 33), m, 0.4, 8);
  // Awkward values survive too.
  s.add("extra", std::vector<float>(33, -0.0f));
  write_store(s, dir / "s.sfnd");
  const auto back = read_store(dir / "s.sfnd");
  EXPECT_TRUE(back.same_content(s));
  EXPECT_EQ(encode_store(back), encode_store(s));
  EXPECT_TRUE(std::signbit(back.at("extra")[0]));
}

TEST(StoreFormat, Errors) {
  auto bad = kGolden;
  bad[0] = 'X';
  EXPECT_EQ(decode_error(bad), ErrorCode::BadMagic);

  auto version = kGolden;
  version[4] = 2;
  EXPECT_EQ(decode_error(version), ErrorCode::BadMagic);

  EXPECT_EQ(decode_error({'S', 'F'}), ErrorCode::TruncatedFile);
  EXPECT_EQ(decode_error(std::vector<std::uint8_t>(kGolden.begin(), kGolden.end() - 3)), ErrorCode::TruncatedFile);

  // Header says 3 values per row but rows hold 2.
  auto dim = kGolden;
  dim[7] = 3;
  EXPECT_EQ(decode_error(dim), ErrorCode::DimMismatch);

  auto nan = kGolden;
  const float q = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(nan.data() + 30, &q, 4);
  EXPECT_EQ(decode_error(nan), ErrorCode::NonFinite);

  try {
    read_store("/nonexistent/store.sfnd");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FileUnreadable);
  }
}

TEST(Store, AddValidates) {
  EmbeddingStore s(testing::mock_descriptor("s", Modality::Text, 2));
  s.add("a", std::vector<float>{1, 2});
  auto code = [&](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code([&] { s.add("b", std::vector<float>{1, 2, 3}); }), ErrorCode::DimMismatch);
  EXPECT_EQ(code([&] { s.add("a", std::vector<float>{1, 2}); }), ErrorCode::DuplicateId);
  EXPECT_EQ(code([&] { s.add("c", std::vector<float>{1, INFINITY}); }), ErrorCode::NonFinite);
  EXPECT_EQ(code([&] { (void)s.at("zzz"); }), ErrorCode::MissingEmbedding);
  EXPECT_EQ(s.size(), 1u);
}

TEST(Registry, TextWidthsAndResolution) {
  EXPECT_EQ(find_descriptor("bert-small")->output_dim, 768u);
  EXPECT_EQ(find_descriptor("ELECTRA small")->output_dim, 256u);
  EXPECT_EQ(find_descriptor("nasnet_mobile")->parameter_count, 4'269'716u);
  EXPECT_FALSE(find_descriptor("my-mock").has_value());

  const auto d = resolve_descriptor("BERT-Small", Modality::Text, 768);
  EXPECT_EQ(d.provenance, Provenance::Imported);
  EXPECT_EQ(d.parameter_count, 30'000'000u);
  EXPECT_THROW(resolve_descriptor("BERT-Small", Modality::Text, 512), Error);
  // Image widths come from the data.
  EXPECT_EQ(resolve_descriptor("NASNet Mobile", Modality::Image, 999).output_dim, 999u);
  EXPECT_EQ(resolve_descriptor("other", Modality::Image, 5).provenance, Provenance::Mock);
}

TEST(Mock, DeterministicAndItemSeeded) {
  const auto m = testing::mock_manifest(20, 1);
  const auto d = testing::mock_descriptor("m", Modality::Text, 16);
  const auto a = mock_embed(d, m.items[3], 0.5, 9);
  EXPECT_EQ(a.vector, mock_embed(d, m.items[3], 0.5, 9).vector);
  EXPECT_NE(a.vector, mock_embed(d, m.items[4], 0.5, 9).vector);
  EXPECT_NE(a.vector, mock_embed(testing::mock_descriptor("n", Modality::Text, 16), m.items[3], 0.5, 9).vector);
  // Store content does not depend on manifest order.
  auto reversed = m;
  std::reverse(reversed.items.begin(), reversed.items.end());
  const auto s1 = mock_store(d, m, 0.5, 9), s2 = mock_store(d, reversed, 0.5, 9);
  for (const auto& id : s1.ids()) {
    const auto x = s1.at(id), y = s2.at(id);
    ASSERT_TRUE(std::equal(x.begin(), x.end(), y.begin()));
  }
}

TEST(Mock, SignalOneIsTheLabelDirection) {
  const auto m = testing::mock_manifest(10, 2);
  const auto d = testing::mock_descriptor("m", Modality::Image, 4);
  for (const auto& item : m.items)
    EXPECT_EQ(mock_embed(d, item, 1.0, 3).vector, label_direction(item.label, 4));
  EXPECT_THROW(mock_embed(d, m.items[0], 1.5, 3), Error);
  EXPECT_THROW(mock_embed(*find_descriptor("BERT-Small"), m.items[0], 0.5, 3), Error);
}

TEST(Mock, FirstCoordinateSeparatesLabelsAtHighSignal) {
  // Oracle for the construction: coordinate 0 is +-s + (1-s) z, so its sign
  // gives the label whenever |z| < s/(1-s).
  const auto m = testing::mock_manifest(400, 7);
  const auto s = mock_store(testing::mock_descriptor("m", Modality::Text, 8), m, 0.9, 1);
  std::size_t agree = 0;
  for (const auto& item : m.items)
    agree += (s.at(item.id)[0] > 0) == (item.label == corpus::Label::Real);
  EXPECT_EQ(agree, m.items.size());
}

}  // namespace
}  // namespace fndstack::backbone
