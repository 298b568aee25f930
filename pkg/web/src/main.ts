import { LensApi } from './api.js';
import { App } from './app.js';

const app = new App(new LensApi(), document);
void app.loadTopics();
