#pragma once

#include "linkassess/classifiers.hpp"
#include "linkassess/dataset.hpp"
#include "linkassess/error.hpp"
#include "linkassess/experiments.hpp"
#include "linkassess/features.hpp"
#include "linkassess/graph.hpp"
#include "linkassess/manifest.hpp"
#include "linkassess/metrics.hpp"
#include "linkassess/random.hpp"
#include "linkassess/ranking.hpp"
#include "linkassess/synthetic.hpp"
#include "linkassess/text.hpp"
