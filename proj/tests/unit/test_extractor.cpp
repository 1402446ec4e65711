#include <gtest/gtest.h>

#include "hydra/extractor.hpp"
#include "hydra/import_resolver.hpp"
#include "test_support.hpp"

using namespace hydra;

namespace {

BuildResult build(const std::map<std::string, std::string>& sources) {
    return build_graph_from_sources("/repo", sources, 1);
}

std::vector<std::string> ids(const CodeGraph& g) {
    std::vector<std::string> out;
    for (const auto& u : g.units()) out.push_back(u.id);
    return out;
}

const ImportEdge* edge(const CodeGraph& g, const std::string& from, const std::string& to) {
    for (const auto& e : g.import_edges())
        if (e.from_file == from && e.to_file == to) return &e;
    return nullptr;
}

}  // namespace

TEST(Extractor, UnitsInSourceOrder) {
    auto r = build({{"m.py",
                     "X = 1\n"
                     "def f(a):\n    \"\"\"Doc.\"\"\"\n    return a\n"
                     "class C(Base):\n    def m(self):\n        pass\n    class Inner:\n        def n(self):\n"
                     "            pass\n"
                     "if True:\n    Y: int = 2\n"
                     "def outer():\n    def hidden():\n        pass\n"}});
    EXPECT_EQ(ids(r.graph),
              (std::vector<std::string>{"m.py::X::Variable", "m.py::f::Function", "m.py::C::Class",
                                        "m.py::C.m::Function", "m.py::C.Inner::Class", "m.py::C.Inner.n::Function",
                                        "m.py::Y::Variable", "m.py::outer::Function"}));
    const CodeUnit* n = r.graph.lookup("m.py::C.Inner.n::Function");
    ASSERT_NE(n, nullptr);
    EXPECT_EQ(n->parent_class, "m.py::C.Inner::Class");
    EXPECT_EQ(r.graph.lookup("m.py::C.Inner::Class")->parent_class, "m.py::C::Class");
}

TEST(Extractor, SpansCoverExactBytes) {
    std::string src = "import os\n\n\n@deco\ndef f(a,\n      b):\n    '''Doc\n\n    more'''\n    return a\n\nZ = (1,\n     2)\n";
    auto r = build({{"m.py", src}});
    for (const auto& u : r.graph.units()) {
        EXPECT_EQ(src.substr(u.span.start_byte, u.span.end_byte - u.span.start_byte), u.body_text) << u.id;
    }
    const CodeUnit* f = r.graph.lookup("m.py::f::Function");
    ASSERT_NE(f, nullptr);
    EXPECT_EQ(f->span.start_line, 4);
    EXPECT_EQ(f->span.end_line, 10);
    EXPECT_EQ(f->signature, "def f(a,\n      b):");
    EXPECT_EQ(f->docstring, "Doc\n\nmore");
    EXPECT_EQ(r.graph.lookup("m.py::Z::Variable")->signature, "Z = (1,");
}

TEST(Extractor, RebindingGetsOrdinals) {
    auto r = build({{"m.py",
                     "class C:\n    @property\n    def x(self):\n        return 1\n    @x.setter\n"
                     "    def x(self, v):\n        pass\n"}});
    EXPECT_NE(r.graph.lookup("m.py::C.x::Function"), nullptr);
    EXPECT_NE(r.graph.lookup("m.py::C.x#2::Function"), nullptr);
}

TEST(Extractor, TupleAndStarredTargets) {
    auto r = build({{"m.py", "a, (b, *c) = f()\nd = e = 0\nobj.attr = 1\n"}});
    EXPECT_EQ(ids(r.graph), (std::vector<std::string>{"m.py::a::Variable", "m.py::b::Variable", "m.py::c::Variable",
                                                      "m.py::d::Variable", "m.py::e::Variable"}));
}

TEST(Extractor, ImportEdgesMergedPerTarget) {
    auto r = build({{"pkg/__init__.py", ""},
                    {"pkg/a.py", "from .b import x, y as z\nfrom . import b\nfrom .b import *\nimport pkg.b as pb\n"},
                    {"pkg/b.py", "x = 1\ny = 2\n"},
                    {"main.py", "import pkg.a\nfrom pkg import a\nimport json\n"}});
    const ImportEdge* ab = edge(r.graph, "pkg/a.py", "pkg/b.py");
    ASSERT_NE(ab, nullptr);
    EXPECT_EQ(ab->imported_names, (std::vector<std::string>{"*", "x", "y as z"}));
    EXPECT_EQ(ab->module_aliases, (std::vector<std::string>{"b", "pb"}));
    const ImportEdge* ma = edge(r.graph, "main.py", "pkg/a.py");
    ASSERT_NE(ma, nullptr);
    EXPECT_EQ(ma->module_aliases, (std::vector<std::string>{"a", "pkg.a"}));
    EXPECT_EQ(r.graph.import_edges().size(), 2u);
    EXPECT_TRUE(r.diagnostics.empty());
}

TEST(Extractor, UnresolvedRelativeImportIsDiagnosed) {
    auto r = build({{"a.py", "from ..up import thing\nfrom .missing import x\n"}});
    EXPECT_TRUE(r.graph.import_edges().empty());
    EXPECT_EQ(r.diagnostics.size(), 2u);
}

TEST(Extractor, BrokenFileKeepsOtherUnits) {
    auto r = build({{"ok.py", "def fine():\n    return 1\n"},
                    {"bad.py", "def good():\n    return 2\n\ndef broken():\n    x = = 1\n\nLATE = 3\n"},
                    {"lex.py", "s = '''unterminated\n"}});
    EXPECT_NE(r.graph.lookup("ok.py::fine::Function"), nullptr);
    EXPECT_NE(r.graph.lookup("bad.py::good::Function"), nullptr);
    EXPECT_NE(r.graph.lookup("bad.py::LATE::Variable"), nullptr);
    EXPECT_EQ(r.graph.lookup("bad.py::broken::Function"), nullptr);
    EXPECT_TRUE(r.graph.has_file("lex.py"));
    EXPECT_TRUE(r.graph.units_in("lex.py").empty());
    std::set<std::string> flagged;
    for (const auto& d : r.diagnostics) flagged.insert(d.file);
    EXPECT_EQ(flagged, (std::set<std::string>{"bad.py", "lex.py"}));
}

TEST(Extractor, IgnoreGlobsAndSortedListing) {
    testkit::TempDir dir;
    dir.write("b.py", "B = 1\n");
    dir.write("a/x.py", "X = 1\n");
    dir.write(".venv/lib/site.py", "S = 1\n");
    dir.write("__pycache__/c.py", "C = 1\n");
    dir.write("gen/skip_me.py", "G = 1\n");
    dir.write("notes.txt", "n\n");
    ExtractionOptions opts;
    opts.ignore_globs.push_back("gen/*");
    EXPECT_EQ(list_source_files(dir.path().string(), opts), (std::vector<std::string>{"a/x.py", "b.py"}));
}

TEST(Extractor, MissingRootIsAnError) { EXPECT_THROW(build_graph("/definitely/not/here"), std::runtime_error); }

TEST(Extractor, ParallelBuildMatchesSerial) {
    ExtractionOptions serial, parallel;
    serial.jobs = 1;
    parallel.jobs = 4;
    for (const auto& name : testkit::labeled_fixtures()) {
        auto a = build_graph(testkit::fixture_dir(name), serial).graph;
        auto b = build_graph(testkit::fixture_dir(name), parallel).graph;
        EXPECT_EQ(a, b) << name;
    }
}

TEST(ImportResolver, PackageBeforeModuleAndSrcRoot) {
    ModuleResolver r({"pkg/__init__.py", "pkg.py", "src/lib/__init__.py", "src/lib/util.py", "ns/mod.py"});
    EXPECT_EQ(r.lookup("main.py", "pkg", 0)->file, "pkg/__init__.py");
    EXPECT_EQ(r.lookup("main.py", "lib.util", 0)->file, "src/lib/util.py");
    auto ns = r.lookup("main.py", "ns", 0);
    ASSERT_TRUE(ns.has_value());
    EXPECT_FALSE(ns->file.has_value());
    EXPECT_EQ(ns->dir, "ns");
    EXPECT_FALSE(r.lookup("main.py", "json", 0).has_value());
    EXPECT_EQ(r.lookup("src/lib/util.py", "", 1)->file, "src/lib/__init__.py");
    EXPECT_FALSE(r.lookup("pkg/__init__.py", "x", 3).has_value());
}
