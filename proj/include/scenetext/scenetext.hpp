#pragma once

#include "scenetext/benchmark.hpp"
#include "scenetext/dataset.hpp"
#include "scenetext/detector.hpp"
#include "scenetext/eval.hpp"
#include "scenetext/geometry.hpp"
#include "scenetext/image.hpp"
#include "scenetext/imgproc.hpp"
#include "scenetext/io.hpp"
#include "scenetext/ocr.hpp"
#include "scenetext/records.hpp"
