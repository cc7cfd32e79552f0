#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <regex>

#include <unistd.h>

#include "generators.hpp"
#include "traceview/diff.hpp"
#include "traceview/error.hpp"
#include "traceview/io.hpp"
#include "traceview/viewpoint.hpp"

using namespace traceview;
namespace fs = std::filesystem;
using tvtest::fixture;

namespace {

const Clock kPinned = fixed_clock(*parse_timestamp("2012-05-01T10:00:00Z"));

std::shared_ptr<const PreferenceSchema> schema() {
  static auto s = std::make_shared<const PreferenceSchema>(default_schema());
  return s;
}

class ViewpointFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("traceview-vp-" + std::to_string(::getpid()) + "-" +
                                       ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  ApplicationState budget_state(const fs::path& csv) const {
    ApplicationState s(schema());
    s.load_dataset(csv, "budget", "year");
    s.add_view({"pie", "budget", ViewKind::pie, ViewRole::master});
    s.add_view({"table", "budget", ViewKind::table, ViewRole::detail});
    s.mutate(action::SetCurrentNode{"pie", "4"});
    s.mutate(action::SetFilterRange{"table", "big", "budget", 30, 70});
    return s;
  }

  fs::path dir;
};

MetaDraft draft(const std::string& name) {
  MetaDraft d;
  d.name = name;
  d.description = "budget overview";
  d.priority = Priority::must_see;
  d.attitude = Attitude::bad_news;
  d.area_id = "fr";
  d.owner = "alice";
  return d;
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  if (pos != std::string::npos) text.replace(pos, from.size(), to);
  return text;
}

}  // namespace

TEST_F(ViewpointFiles, CaptureDerivesThePeriodFromTheTimeColumn) {
  auto vp = capture(budget_state(fixture("ministries_budget.csv")), draft("v"));
  ASSERT_TRUE(vp.content.period);
  EXPECT_EQ(vp.content.period->start, "2010-01-01");
  EXPECT_EQ(vp.content.period->end, "2012-12-31");
  EXPECT_EQ(vp.owner.name, "alice");
  EXPECT_EQ(vp.snapshot, budget_state(fixture("ministries_budget.csv")).snapshot());
}

TEST_F(ViewpointFiles, CaptureWithoutTemporalDataHasNoPeriod) {
  ApplicationState s(schema());
  s.load_dataset(fixture("ministries_budget.csv"), "b");
  s.add_view({"v", "b", ViewKind::table, ViewRole::master});
  EXPECT_FALSE(capture(s, draft("v")).content.period);
  EXPECT_FALSE(capture(ApplicationState(schema()), draft("v")).content.period);
}

TEST_F(ViewpointFiles, OwnerComesFromTheSessionIdentityOverride) {
  ::setenv("TRACEVIEW_USER", "bob", 1);
  MetaDraft d = draft("v");
  d.owner.reset();
  EXPECT_EQ(capture(ApplicationState(schema()), d).owner.name, "bob");
  EXPECT_EQ(session_identity(), "bob");
  ::unsetenv("TRACEVIEW_USER");
  EXPECT_FALSE(session_identity().empty());
}

TEST_F(ViewpointFiles, CaptureRequiresAName) {
  EXPECT_THROW(capture(ApplicationState(schema()), draft("")), ValidationError);
}

TEST_F(ViewpointFiles, SaveLoadSaveIsByteIdentical) {
  auto vp = capture(budget_state(fixture("ministries_budget.csv")), draft("v"));
  auto saved = save_viewpoint(vp, dir / "a.xml", *schema(), kPinned);
  EXPECT_EQ(saved.file.saved_at, "2012-05-01T10:00:00Z");
  auto loaded = load_viewpoint(dir / "a.xml", *schema(), default_area_list());
  EXPECT_EQ(loaded, saved);
  save_viewpoint(loaded, dir / "a.xml", *schema(), kPinned);
  auto first = read_file(dir / "a.xml");
  save_viewpoint(load_viewpoint(dir / "a.xml", *schema(), default_area_list()), dir / "a.xml", *schema(), kPinned);
  EXPECT_EQ(read_file(dir / "a.xml"), first);
}

TEST_F(ViewpointFiles, RandomViewpointsRoundTrip) {
  tvtest::Rng rng(31337);
  for (int i = 0; i < 200; ++i) {
    auto vp = tvtest::random_viewpoint(rng, *schema(), default_area_list(), "2012-05-01T10:00:00Z");
    std::string xml = viewpoint_to_xml(vp, *schema());
    auto back = viewpoint_from_xml(xml, *schema(), default_area_list());
    ASSERT_EQ(back, vp) << xml;
    ASSERT_EQ(viewpoint_to_xml(back, *schema()), xml);
  }
}

TEST_F(ViewpointFiles, AssignmentsAreWrittenInCanonicalOrder) {
  auto vp = capture(budget_state(fixture("ministries_budget.csv")), draft("v"));
  std::string xml = viewpoint_to_xml(vp, *schema());
  static const std::regex pref(R"re(<preference id="([^"]*)" scope="([^"]*)" instance="([^"]*)")re");
  std::vector<std::tuple<int, std::string, std::string>> seen;
  auto rank = [](const std::string& scope) { return scope == "application" ? 0 : scope == "relation" ? 1 : 2; };
  for (auto it = std::sregex_iterator(xml.begin(), xml.end(), pref); it != std::sregex_iterator(); ++it) {
    seen.emplace_back(rank((*it)[2]), (*it)[3], (*it)[1]);
  }
  EXPECT_EQ(seen.size(), vp.snapshot.assignments.size());
  EXPECT_TRUE(std::is_sorted(seen.begin(), seen.end()));
  EXPECT_TRUE(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
}

TEST_F(ViewpointFiles, DeepEqualViewpointsSerializeIdentically) {
  tvtest::Rng a(5);
  tvtest::Rng b(5);
  auto v1 = tvtest::random_viewpoint(a, *schema(), default_area_list(), "2012-05-01T10:00:00Z");
  auto v2 = tvtest::random_viewpoint(b, *schema(), default_area_list(), "2012-05-01T10:00:00Z");
  ASSERT_EQ(v1, v2);
  EXPECT_EQ(viewpoint_to_xml(v1, *schema()), viewpoint_to_xml(v2, *schema()));
}

TEST_F(ViewpointFiles, UnwritableDirectoryIsAnIoError) {
  auto vp = capture(ApplicationState(schema()), draft("v"));
  EXPECT_THROW(save_viewpoint(vp, dir / "no" / "such" / "v.xml", *schema(), kPinned), IoError);
  EXPECT_FALSE(fs::exists(dir / "no"));
}

TEST_F(ViewpointFiles, LoadRejectsInvalidDocuments) {
  auto vp = capture(budget_state(fixture("ministries_budget.csv")), draft("v"));
  vp.file.saved_at = "2012-05-01T10:00:00Z";
  const std::string good = viewpoint_to_xml(vp, *schema());
  const auto& areas = default_area_list();
  EXPECT_NO_THROW(viewpoint_from_xml(good, *schema(), areas));

  EXPECT_THROW(viewpoint_from_xml(replace(good, "priority=\"must-see\"", "priority=\"urgent\""), *schema(), areas),
               ValidationError);
  EXPECT_THROW(viewpoint_from_xml(replace(good, "attitude=\"bad-news\"", "attitude=\"meh\""), *schema(), areas),
               ValidationError);
  EXPECT_THROW(viewpoint_from_xml(replace(good, "format-version=\"1\"", "format-version=\"9\""), *schema(), areas),
               ValidationError);
  // An application-only preference moved to a view scope.
  EXPECT_THROW(viewpoint_from_xml(replace(good,
                                          "<preference id=\"export.image-format\" scope=\"application\" instance=\"\"",
                                          "<preference id=\"export.image-format\" scope=\"view\" instance=\"pie\""),
                                  *schema(), areas),
               ValidationError);
  EXPECT_THROW(viewpoint_from_xml(replace(good, "id=\"export.image-format\"", "id=\"export.retired\""), *schema(),
                                  areas),
               NotFoundError);
  EXPECT_THROW(viewpoint_from_xml(replace(good, ">png<", ">gif<"), *schema(), areas), ValidationError);
  EXPECT_THROW(viewpoint_from_xml(replace(good, "area-id=\"fr\"", "area-id=\"atlantis\""), *schema(), areas),
               ValidationError);
  EXPECT_THROW(viewpoint_from_xml(replace(good, "instance=\"pie\"", "instance=\"ghost\""), *schema(), areas),
               ValidationError);
  EXPECT_THROW(viewpoint_from_xml(good.substr(0, good.size() / 2), *schema(), areas), ParseError);
}

TEST_F(ViewpointFiles, EditingMetadataKeepsTheAssignments) {
  auto vp = capture(budget_state(fixture("ministries_budget.csv")), draft("v"));
  MetaChanges c;
  c.attitude = Attitude::good_news;
  c.description = "revised";
  c.area_id = std::optional<std::string>{};
  auto edited = edit_metadata(vp, c, default_area_list());
  EXPECT_EQ(edited.owner.attitude, Attitude::good_news);
  EXPECT_FALSE(edited.content.area_id);
  EXPECT_EQ(edited.snapshot, vp.snapshot);
  auto report = diff(vp, edited, *schema());
  EXPECT_EQ(report.raw_distance.micros(), 0);
  EXPECT_EQ(report.normalized_percent, 0.0);
}

TEST_F(ViewpointFiles, EditingToAnUnknownAreaFails) {
  auto vp = capture(ApplicationState(schema()), draft("v"));
  MetaChanges c;
  c.area_id = std::optional<std::string>{"atlantis"};
  EXPECT_THROW(edit_metadata(vp, c, default_area_list()), ValidationError);
  MetaChanges empty_name;
  empty_name.name = "";
  EXPECT_THROW(edit_metadata(vp, empty_name, default_area_list()), ValidationError);
}

TEST_F(ViewpointFiles, DerivativeSavedElsewhereKeepsTheOriginal) {
  auto vp = save_viewpoint(capture(ApplicationState(schema()), draft("v")), dir / "orig.xml", *schema(), kPinned);
  const auto before = read_file(dir / "orig.xml");
  MetaChanges c;
  c.name = "derived";
  save_viewpoint(edit_metadata(vp, c, default_area_list()), dir / "derived.xml", *schema(),
                 fixed_clock(*parse_timestamp("2013-01-01T00:00:00Z")));
  EXPECT_EQ(read_file(dir / "orig.xml"), before);
  EXPECT_EQ(load_viewpoint(dir / "derived.xml", *schema(), default_area_list()).file.saved_at,
            "2013-01-01T00:00:00Z");
}

TEST_F(ViewpointFiles, ApplyRestoresTheCapturedState) {
  auto origin = budget_state(fixture("ministries_budget.csv"));
  auto vp = capture(origin, draft("v"));
  auto same = origin;
  apply(vp, same);
  EXPECT_TRUE(same == origin);
  ApplicationState fresh(schema());
  apply(vp, fresh);
  EXPECT_TRUE(fresh == origin);
}

TEST_F(ViewpointFiles, ApplyWithAMissingCsvNamesThePath) {
  fs::copy_file(fixture("ministries_budget.csv"), dir / "b.csv");
  auto vp = capture(budget_state(dir / "b.csv"), draft("v"));
  fs::remove(dir / "b.csv");
  ApplicationState s(schema());
  try {
    apply(vp, s);
    FAIL();
  } catch (const MissingDatasetError& e) {
    EXPECT_NE(std::string(e.what()).find((dir / "b.csv").string()), std::string::npos);
  }
}

TEST(Areas, ShippedListHasWorldAndIsoCodes) {
  const auto& areas = default_area_list();
  ASSERT_TRUE(areas.find("world"));
  ASSERT_TRUE(areas.find("fr"));
  EXPECT_EQ(areas.find("fr")->name, "France");
  EXPECT_GT(areas.areas().size(), 240u);
  EXPECT_FALSE(areas.contains("xx"));
  EXPECT_THROW(parse_area_list("id,name,icon\na,A,x\na,B,y\n"), ValidationError);
  EXPECT_THROW(parse_area_list("code,name\n"), ValidationError);
}

TEST(Enums, SpellingsAreExact) {
  EXPECT_EQ(to_string(Priority::must_see), "must-see");
  EXPECT_EQ(to_string(Priority::facultative), "facultative");
  EXPECT_EQ(to_string(Attitude::good_news), "good-news");
  EXPECT_EQ(parse_attitude("bad-news"), Attitude::bad_news);
  EXPECT_FALSE(parse_priority("urgent"));
  EXPECT_FALSE(parse_priority("Must-see"));
}
