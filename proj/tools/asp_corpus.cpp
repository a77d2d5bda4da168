// Writes the corpus entries, their expectation sidecars and the golden
// files into a directory (normally corpus/).

#include <filesystem>
#include <fstream>
#include <iostream>

#include "asp/corpus.hpp"
#include "asp/dynamics.hpp"

namespace fs = std::filesystem;

namespace {

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: asp_corpus DIR\n";
    return 4;
  }
  const fs::path dir(argv[1]);
  fs::create_directories(dir / "golden");
  for (const auto& e : asp::all_corpus_entries()) {
    write(dir / (e.name + ".asp"), e.source);
    write(dir / (e.name + ".expect.json"), asp::expectations_json(e));
    write(dir / "golden" / (e.name + ".printed.asp"), asp::print(e.file));
    auto trace = asp::run(e.file.main, asp::Scheduler::leftmost(), 1000);
    write(dir / "golden" / (e.name + ".leftmost.jsonl"), asp::trace_jsonl(trace, false));
  }
  return 0;
}
