#include "ghostbench/grid.hpp"
#include "ghostbench/keyvalue.hpp"
#include "ghostbench/pgm.hpp"
#include "ghostbench/rng.hpp"

#include <gtest/gtest.h>

using namespace ghost;

TEST(KeyValueFile, ParsesCommentsAndWhitespace) {
  const auto kv = KeyValueFile::parse("# header\n a = 1.5 \n\nb=two # trailing\r\n");
  EXPECT_DOUBLE_EQ(kv.number("a"), 1.5);
  EXPECT_EQ(kv.raw("b"), "two");
  EXPECT_EQ(kv.entries().size(), 2u);
}

TEST(KeyValueFile, RejectsMalformedInput) {
  EXPECT_THROW(KeyValueFile::parse("novalue\n"), ParseError);
  EXPECT_THROW(KeyValueFile::parse("=3\n"), ParseError);
  EXPECT_THROW(KeyValueFile::parse("a=1\na=2\n"), ParseError);
  EXPECT_THROW(KeyValueFile::parse("a=1x").number("a"), ParseError);
  EXPECT_THROW(KeyValueFile::parse("a=1").raw("b"), ParseError);
  EXPECT_THROW(KeyValueFile::parse("a=1\nb=2").require_known({"a"}), ParseError);
}

TEST(KeyValueFile, Booleans) {
  const auto kv = KeyValueFile::parse("t=true\nf=0\nx=maybe");
  EXPECT_TRUE(kv.boolean_or("t", false));
  EXPECT_FALSE(kv.boolean_or("f", true));
  EXPECT_TRUE(kv.boolean_or("missing", true));
  EXPECT_THROW(kv.boolean_or("x", true), ParseError);
}

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 276.7e-6, 1.0 / 3.0, -2.5e300, 0.0}) EXPECT_EQ(parse_double(format_double(v)), v);
}

TEST(SplitList, TrimsAndDropsEmpty) {
  EXPECT_EQ(split_list(" 1, 2 ,,3 "), (std::vector<std::string>{"1", "2", "3"}));
}

TEST(Pgm, PlainWithComments) {
  const auto img = parse_pgm("P2\n# comment\n2 1\n# another\n255\n0 128\n");
  EXPECT_EQ(img.width, 2);
  EXPECT_EQ(img.height, 1);
  EXPECT_EQ(img.maxval, 255);
  EXPECT_EQ(img.samples, (std::vector<std::uint16_t>{0, 128}));
}

TEST(Pgm, BinaryEightAndSixteenBit) {
  std::string p5 = "P5\n2 2\n255\n";
  p5 += std::string{'\x00', '\x01', '\x7f', '\xff'};
  EXPECT_EQ(parse_pgm(p5).samples, (std::vector<std::uint16_t>{0, 1, 127, 255}));

  std::string wide = "P5 1 2 65535\n";
  wide += std::string{'\x01', '\x02', '\xff', '\xfe'};
  EXPECT_EQ(parse_pgm(wide).samples, (std::vector<std::uint16_t>{0x0102, 0xfffe}));
}

TEST(Pgm, RejectsMalformed) {
  EXPECT_THROW(parse_pgm("P3\n1 1\n255\n0"), ParseError);
  EXPECT_THROW(parse_pgm("P2\n1 1\n70000\n0"), ParseError);
  EXPECT_THROW(parse_pgm("P2\n1 1\n0\n0"), ParseError);
  EXPECT_THROW(parse_pgm("P2\n2 2\n255\n0 0 0"), ParseError);
  EXPECT_THROW(parse_pgm("P2\n1 1\n10\n11"), ParseError);
  EXPECT_THROW(parse_pgm("P5\n2 2\n255\n\x01"), ParseError);
  EXPECT_THROW(parse_pgm("P2"), ParseError);
}

TEST(Pgm, EncodeParseIdentityOnRandomRasters) {
  GaussianStream rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    Graymap img;
    img.width = 1 + static_cast<int>(rng.uniform() * 9);
    img.height = 1 + static_cast<int>(rng.uniform() * 9);
    img.maxval = trial % 2 ? 65535 : 1 + static_cast<int>(rng.uniform() * 254);
    for (int i = 0; i < img.width * img.height; ++i)
      img.samples.push_back(static_cast<std::uint16_t>(rng.uniform() * img.maxval));
    for (auto enc : {PgmEncoding::Plain, PgmEncoding::Binary}) {
      const auto back = parse_pgm(encode_pgm(img, enc));
      EXPECT_EQ(back.width, img.width);
      EXPECT_EQ(back.height, img.height);
      EXPECT_EQ(back.maxval, img.maxval);
      EXPECT_EQ(back.samples, img.samples);
    }
  }
}

TEST(Pgm, HeaderIsExact) {
  Graymap img;
  img.width = 3;
  img.height = 1;
  img.maxval = 255;
  img.samples = {1, 2, 3};
  EXPECT_EQ(encode_pgm(img, PgmEncoding::Plain), "P2\n3 1\n255\n1 2 3\n");
  EXPECT_EQ(encode_pgm(img, PgmEncoding::Binary), std::string("P5\n3 1\n255\n\x01\x02\x03"));
}
