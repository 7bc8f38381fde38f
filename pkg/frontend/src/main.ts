// Browser entry point. The API base defaults to the page's own origin and
// can be overridden via window.GREYLIT_API_BASE before this script loads.

import { ApiClient } from './api.js';
import { initApp } from './app.js';

declare global {
  interface Window {
    GREYLIT_API_BASE?: string;
  }
}

const root = document.getElementById('app');
if (root) {
  initApp(root, new ApiClient(window.GREYLIT_API_BASE ?? ''));
}
