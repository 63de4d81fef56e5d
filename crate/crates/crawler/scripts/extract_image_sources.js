var out = [];
var imgs = document.querySelectorAll('img[src]');
for (var i = 0; i < imgs.length; i++) out.push(imgs[i].getAttribute('src'));
return out;
