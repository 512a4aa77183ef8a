/*
Copyright 2026 the pjpeg authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

                http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include "pjpeg/bitstream.hpp"
#include "pjpeg/common.hpp"
#include "pjpeg/huffman.hpp"
#include "pjpeg/oracle.hpp"
#include "pjpeg/parallel_decode.hpp"
#include "pjpeg/parser.hpp"
#include "pjpeg/pipeline.hpp"
#include "pjpeg/ppm.hpp"
#include "pjpeg/transform.hpp"
