import { ApiClient } from "./api";
import { App } from "./app";

const root = document.getElementById("app");
if (root) {
  const api = new ApiClient(import.meta.env?.VITE_API_BASE ?? "");
  void new App(root, api).init();
}
