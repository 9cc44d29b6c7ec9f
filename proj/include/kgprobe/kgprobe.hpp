#pragma once

#include "kgprobe/assignment.hpp"
#include "kgprobe/conllu.hpp"
#include "kgprobe/corpus.hpp"
#include "kgprobe/diagnostics.hpp"
#include "kgprobe/error.hpp"
#include "kgprobe/extract.hpp"
#include "kgprobe/feather.hpp"
#include "kgprobe/ged.hpp"
#include "kgprobe/graph.hpp"
#include "kgprobe/parallel.hpp"
#include "kgprobe/pipeline.hpp"
#include "kgprobe/porter.hpp"
