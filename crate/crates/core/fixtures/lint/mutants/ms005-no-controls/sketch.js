// Bouncing Ball
// A ball moves across the drawing region and bounces off its edges.

// Canvas dimensions
let canvasWidth = 400;
let drawHeight = 400;
let controlHeight = 50;
let canvasHeight = drawHeight + controlHeight;
let margin = 25;
let sliderLeftMargin = 105;
let defaultTextSize = 16;

let x = 100;
let y = 100;
let dx = 3;
let dy = 2;
let radius = 20;
let running = false;

let speedSlider;
let startButton;

function setup() {
  updateCanvasSize();
  const canvas = createCanvas(canvasWidth, canvasHeight);
  canvas.parent(document.querySelector('main'));

  speedSlider.position(sliderLeftMargin, drawHeight + 15);
  speedSlider.size(canvasWidth - sliderLeftMargin - margin);

  startButton.position(10, drawHeight + 12);
  startButton.mousePressed(toggleRunning);

  describe('A ball bounces around a box. Use the slider to change its speed and the button to start or pause it.', LABEL);
}

function draw() {
  updateCanvasSize();

  // drawing region
  fill('aliceblue');
  stroke('silver');
  strokeWeight(1);
  rect(0, 0, canvasWidth, drawHeight);

  // controls region
  fill('white');
  rect(0, drawHeight, canvasWidth, controlHeight);

  // title
  fill('black');
  noStroke();
  textSize(24);
  textAlign(CENTER, TOP);
  text('Bouncing Ball', canvasWidth / 2, margin / 2);

  if (running) {
    const speed = speedSlider.value();
    x += dx * speed / 3;
    y += dy * speed / 3;
    if (x < radius || x > canvasWidth - radius) {
      dx = -dx;
    }
    if (y < radius || y > drawHeight - radius) {
      dy = -dy;
    }
  }
  fill('orange');
  circle(x, y, radius * 2);

  fill('black');
  textSize(defaultTextSize);
  textAlign(LEFT, CENTER);
  text('Speed: ' + speedSlider.value(), 60, drawHeight + 25);
}

function toggleRunning() {
  running = !running;
  startButton.html(running ? 'Pause' : 'Start');
}

function windowResized() {
  updateCanvasSize();
  resizeCanvas(canvasWidth, canvasHeight);
  speedSlider.size(canvasWidth - sliderLeftMargin - margin);
}

function updateCanvasSize() {
  const container = document.querySelector('main');
  canvasWidth = container ? container.getBoundingClientRect().width : windowWidth;
}
