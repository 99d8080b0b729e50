#pragma once

#include "labelscape/bits_io.hpp"
#include "labelscape/embedding.hpp"
#include "labelscape/errors.hpp"
#include "labelscape/experiment.hpp"
#include "labelscape/experiment_io.hpp"
#include "labelscape/knn.hpp"
#include "labelscape/landscape.hpp"
#include "labelscape/landscape_io.hpp"
#include "labelscape/maurer.hpp"
#include "labelscape/randomize.hpp"
#include "labelscape/rng.hpp"
#include "labelscape/stats.hpp"
#include "labelscape/synthetic.hpp"
#include "labelscape/version.hpp"
