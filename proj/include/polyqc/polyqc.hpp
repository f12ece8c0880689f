#pragma once

#include "polyqc/errors.hpp"
#include "polyqc/fock.hpp"
#include "polyqc/interferometer.hpp"
#include "polyqc/simulator.hpp"
#include "polyqc/serialization.hpp"
#include "polyqc/dataset.hpp"
#include "polyqc/featurize.hpp"
#include "polyqc/metrics.hpp"
#include "polyqc/qml/vqc.hpp"
#include "polyqc/qml/nelder_mead.hpp"
#include "polyqc/qml/gaussian_process.hpp"
#include "polyqc/qml/seesaw.hpp"
#include "polyqc/qml/spectrum.hpp"
#include "polyqc/pipeline/config.hpp"
#include "polyqc/pipeline/csv.hpp"
#include "polyqc/pipeline/experiment.hpp"
