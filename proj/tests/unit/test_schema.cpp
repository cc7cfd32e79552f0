#include <gtest/gtest.h>

#include <string>

#include "oracles.hpp"
#include "traceview/error.hpp"
#include "traceview/schema.hpp"

using namespace traceview;

namespace {

std::string schema_doc(const std::string& body) {
  return "<?xml version=\"1.0\"?>\n<preference-schema format-version=\"1\">\n" + body + "</preference-schema>\n";
}

std::string pref(const std::string& id, const std::string& category, const std::string& weight,
                 const std::string& kind = "integer", const std::string& def = "0",
                 const std::string& scopes = "application") {
  return "<preference id=\"" + id + "\" category=\"" + category + "\" scopes=\"" + scopes + "\" kind=\"" + kind +
         "\" weight=\"" + weight + "\" default=\"" + def + "\" origin=\"explicit\"/>\n";
}

const std::string kCat = "<category name=\"c\"/>\n";

// Golden: sum of the shipped weights, confirmed by the regex oracle below.
constexpr std::int64_t kDefaultTotalWeightMicros = 30'500'000;

}  // namespace

TEST(Schema, DefaultSchemaHasTheSevenCategories) {
  const auto& s = default_schema();
  std::vector<std::string> names;
  for (const auto& c : s.categories()) names.push_back(c.name);
  EXPECT_EQ(names, (std::vector<std::string>{"data-displayed", "filter-specific", "import-export", "localization",
                                             "timeline", "ui-global-layout", "view-specific"}));
  EXPECT_GE(s.preferences().size(), 14u);
}

TEST(Schema, DefaultSchemaTotalWeightMatchesOracle) {
  const std::string doc(default_schema_document());
  EXPECT_EQ(tvtest::oracle::total_weight(doc), kDefaultTotalWeightMicros);
  EXPECT_EQ(default_schema().total_weight().micros(), kDefaultTotalWeightMicros);
  EXPECT_EQ(tvtest::oracle::schema_weights(doc).size(), default_schema().preferences().size());
}

TEST(Schema, TotalWeightEqualsResummedLookups) {
  const auto& s = default_schema();
  std::int64_t sum = 0;
  for (const auto& p : s.preferences()) sum += s.lookup(p.id).weight.micros();
  EXPECT_EQ(s.total_weight().micros(), sum);
}

TEST(Schema, TotalWeightHandSums) {
  auto s = load_schema(schema_doc(kCat + pref("a", "c", "3") + pref("b", "c", "1") + pref("d", "c", "0.5")));
  EXPECT_EQ(s.total_weight().to_string(), "4.5");
  auto single = load_schema(schema_doc(kCat + pref("a", "c", "2")));
  EXPECT_EQ(single.total_weight().to_string(), "2");
}

TEST(Schema, LookupOfTheSliceColourPreference) {
  const auto& def = default_schema().lookup("pie.slice-color-semantics");
  EXPECT_EQ(def.category, "view-specific");
  EXPECT_THROW(default_schema().lookup(""), NotFoundError);
  EXPECT_EQ(default_schema().find("no.such"), nullptr);
}

TEST(Schema, LookupReturnsDeclaredWeight) {
  auto s = load_schema(schema_doc(kCat + pref("a", "c", "1.234567")));
  EXPECT_EQ(s.lookup("a").weight.micros(), 1'234'567);
}

TEST(Schema, ApplicabilityFollowsScopes) {
  const auto& s = default_schema();
  // Application only.
  EXPECT_TRUE(s.applicable_at("layout.default-master-views", ScopeLevel::application));
  EXPECT_FALSE(s.applicable_at("layout.default-master-views", ScopeLevel::relation));
  EXPECT_FALSE(s.applicable_at("layout.default-master-views", ScopeLevel::view));
  // Relation and view only.
  EXPECT_FALSE(s.applicable_at("chart.axis-attributes", ScopeLevel::application));
  EXPECT_TRUE(s.applicable_at("chart.axis-attributes", ScopeLevel::relation));
  EXPECT_TRUE(s.applicable_at("chart.axis-attributes", ScopeLevel::view));
  EXPECT_THROW(s.applicable_at("nope", ScopeLevel::view), NotFoundError);
  for (const auto& p : s.preferences()) {
    bool any = false;
    for (auto l : {ScopeLevel::application, ScopeLevel::relation, ScopeLevel::view}) any |= s.applicable_at(p.id, l);
    EXPECT_TRUE(any) << p.id;
    for (auto l : p.scopes) EXPECT_TRUE(s.applicable_at(p.id, l)) << p.id;
  }
}

TEST(Schema, ExampleNamedPreferencesExist) {
  const auto& s = default_schema();
  for (const char* id : {"layout.default-master-views", "layout.default-detail-views", "chart.axis-attributes",
                         "locale.number-format", "import.csv-default-path", "timeline.max-periods",
                         "filter.satisfaction-scale", "pie.slice-color-semantics"}) {
    EXPECT_NE(s.find(id), nullptr) << id;
  }
}

TEST(Schema, CategoryWithoutPreferencesIsRejected) {
  EXPECT_THROW(load_schema(schema_doc(kCat + "<category name=\"lonely\"/>\n" + pref("a", "c", "1"))),
               ValidationError);
}

TEST(Schema, NegativeWeightIsRejected) {
  try {
    load_schema(schema_doc(kCat + pref("x", "c", "-1")));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("negative weight"), std::string::npos);
  }
}

TEST(Schema, OtherInvariantViolations) {
  EXPECT_THROW(load_schema(schema_doc(kCat + pref("a", "zzz", "1"))), ValidationError);  // unknown category
  EXPECT_THROW(load_schema(schema_doc(kCat + pref("a", "c", "1") + pref("a", "c", "2"))), ValidationError);
  EXPECT_THROW(load_schema(schema_doc(kCat + pref("a", "c", "1", "boolean", "maybe"))), ValidationError);
  EXPECT_THROW(load_schema(schema_doc(kCat + pref("a", "c", "1", "enum()", ""))), ValidationError);
  EXPECT_THROW(load_schema(schema_doc(kCat + pref("a", "c", "1", "integer", "0", ""))), ValidationError);
  EXPECT_THROW(load_schema(schema_doc(kCat + pref("a", "c", "0.0000001"))), ValidationError);
  EXPECT_THROW(load_schema(schema_doc("<category name=\"Bad Name\"/>\n" + pref("a", "Bad Name", "1"))),
               ValidationError);
  EXPECT_THROW(load_schema("<preference-schema format-version=\"2\"/>"), ValidationError);
  EXPECT_THROW(load_schema("<preference-schema format-version=\"1\">"), ParseError);
}

TEST(Schema, ErrorNamesTheOffendingPreference) {
  try {
    load_schema(schema_doc(kCat + pref("ok", "c", "1") + pref("broken", "c", "1", "color", "red")));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("broken"), std::string::npos);
  }
}

TEST(Schema, LoadIsDeterministicAndCanonicalFormRoundTrips) {
  const std::string doc(default_schema_document());
  EXPECT_EQ(load_schema(doc), load_schema(doc));
  const std::string canonical = schema_to_xml(default_schema());
  EXPECT_EQ(load_schema(canonical), default_schema());
  EXPECT_EQ(schema_to_xml(load_schema(canonical)), canonical);
}

TEST(Schema, CanonicalFormSortsById) {
  auto s = load_schema(schema_doc("<category name=\"z\"/>\n" + kCat + pref("b", "z", "1") + pref("a", "c", "1")));
  EXPECT_EQ(s.categories()[0].name, "c");
  EXPECT_EQ(s.preferences()[0].id, "a");
  auto xml = schema_to_xml(s);
  EXPECT_LT(xml.find("name=\"c\""), xml.find("name=\"z\""));
  EXPECT_LT(xml.find("id=\"a\""), xml.find("id=\"b\""));
}

TEST(ValueTypes, Canonicalization) {
  auto t = [](const char* spelling) { return *ValueType::parse(spelling); };
  EXPECT_EQ(t("boolean").canonicalize("true"), "true");
  EXPECT_FALSE(t("boolean").canonicalize("42"));
  EXPECT_FALSE(t("boolean").canonicalize("TRUE"));
  EXPECT_EQ(t("integer").canonicalize("-12"), "-12");
  EXPECT_EQ(t("integer").canonicalize("007"), "7");
  EXPECT_FALSE(t("integer").canonicalize("1.0"));
  EXPECT_FALSE(t("integer").canonicalize("99999999999999999999"));
  EXPECT_EQ(t("decimal").canonicalize("2.50"), "2.5");
  EXPECT_FALSE(t("decimal").canonicalize("abc"));
  EXPECT_EQ(t("color").canonicalize("#A0b1C2"), "#a0b1c2");
  EXPECT_EQ(t("color").canonicalize("#aBc"), "#aabbcc");
  EXPECT_FALSE(t("color").canonicalize("#abcd"));
  EXPECT_EQ(t("enum(png|svg)").canonicalize("svg"), "svg");
  EXPECT_FALSE(t("enum(png|svg)").canonicalize("gif"));
  EXPECT_EQ(t("attribute-list").canonicalize("a,b"), "a,b");
  EXPECT_EQ(t("attribute-list").canonicalize(""), "");
  EXPECT_FALSE(t("attribute-list").canonicalize("a,,b"));
  EXPECT_FALSE(t("attribute-list").canonicalize("a,a"));
  EXPECT_EQ(t("string").canonicalize("any text\n"), "any text\n");
  EXPECT_FALSE(t("string").canonicalize("\x07"));
  EXPECT_EQ(t("enum(a|b)").to_string(), "enum(a|b)");
  EXPECT_FALSE(ValueType::parse("float"));
}

TEST(Weights, FixedPointArithmetic) {
  auto a = *Weight::parse("0.1");
  auto b = *Weight::parse("0.2");
  EXPECT_EQ((a + b).to_string(), "0.3");
  EXPECT_EQ(Weight::parse("3")->micros(), 3'000'000);
  EXPECT_FALSE(Weight::parse("-1"));
  EXPECT_FALSE(Weight::parse("1e3"));
  EXPECT_FALSE(Weight::parse(".5"));
  EXPECT_EQ(Weight::from_micros(1).to_string(), "0.000001");
}
