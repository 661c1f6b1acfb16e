/**
 * Entry point.  The page is served by `osu serve --ui`, so the service
 * lives on the same origin and the client needs no base URL.
 */

import { ApiClient } from "./api.js";
import { buildApp } from "./app.js";

const root = document.getElementById("app");
if (root) {
  buildApp(root, new ApiClient());
}
